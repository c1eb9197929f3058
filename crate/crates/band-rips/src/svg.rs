//! Schematic SVG of a band complex: the support drawn twice (bottom bases on
//! the lower copy, top bases on the upper copy) and each band as a shaded
//! quadrilateral between its two bases.

use std::fmt::Write;

use crate::BandComplex;

const W: f64 = 800.0;
const H: f64 = 260.0;
const PAD: f64 = 30.0;

pub fn to_svg(x: &BandComplex) -> String {
    let (lo, hi) = match (x.arcs.first(), x.arcs.last()) {
        (Some(a), Some(b)) => (a.lo.v.to_f64(), b.hi.v.to_f64()),
        _ => (0.0, 1.0),
    };
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let sx = |v: f64| PAD + (v - lo) / span * (W - 2.0 * PAD);
    let (y_bot, y_top) = (H - PAD, PAD + 20.0);
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    for (i, b) in x.bands.iter().enumerate() {
        let hue = (i * 67) % 360;
        let (bl, bh) = (sx(b.bottom.lo.v.to_f64()), sx(b.bottom.hi.v.to_f64()));
        let (tl, th) = (sx(b.top.lo.v.to_f64()), sx(b.top.hi.v.to_f64()));
        writeln!(
            s,
            r#"<polygon points="{bl:.2},{y_bot} {bh:.2},{y_bot} {th:.2},{y_top} {tl:.2},{y_top}" fill="hsl({hue},60%,70%)" fill-opacity="0.45" stroke="hsl({hue},60%,35%)" stroke-width="0.8"/>"#
        )
        .unwrap();
        let mx = (bl + bh + tl + th) / 4.0;
        writeln!(
            s,
            r#"<text x="{mx:.2}" y="{:.2}" font-size="10" text-anchor="middle" font-family="sans-serif">{} (l={})</text>"#,
            (y_bot + y_top) / 2.0,
            b.id,
            b.length
        )
        .unwrap();
    }
    for a in &x.arcs {
        let (l, h) = (sx(a.lo.v.to_f64()), sx(a.hi.v.to_f64()));
        for y in [y_bot, y_top] {
            writeln!(s, r#"<line x1="{l:.2}" y1="{y}" x2="{h:.2}" y2="{y}" stroke="black" stroke-width="2.5"/>"#).unwrap();
        }
    }
    writeln!(s, "</svg>").unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex_from_iis;
    use iis_core::systems::{build_system, SystemId};

    #[test]
    fn one_polygon_per_band_and_two_lines_per_arc() {
        let x = complex_from_iis(&build_system(SystemId::S1));
        let s = to_svg(&x);
        assert!(s.starts_with("<svg"));
        assert_eq!(s.matches("<polygon").count(), 3);
        assert_eq!(s.matches("<line").count(), 2);
        assert!(s.trim_end().ends_with("</svg>"));
    }
}
