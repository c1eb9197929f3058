//! The triply periodic PL surface built from four rectangles, its exact
//! geometric checks, and float tracing of plane sections `x2 = const`.

mod error;
pub mod render;
pub mod surface;
pub mod trace;

pub use error::SurfaceError;
pub use render::{section_json, section_svg};
pub use surface::{build_surface, Center, PLSurface, Rect, SaddleLevels, SymmetryReport, Topology};
pub use trace::{
    component_census, components_meeting_inner, raster_census, sample_levels, trace_section, trace_window, Census,
    FloatSurface, RasterCensus, SectionComponent, Window, WindowClass, DEFAULT_EPS,
};
