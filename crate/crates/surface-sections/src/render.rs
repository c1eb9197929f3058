use std::fmt::Write;

use serde_json::{json, Value};

use crate::trace::{component_census, SectionComponent, Window, WindowClass};

/// Bold section polylines over a light unit grid; x1 to the right, x3 up.
pub fn section_svg(components: &[SectionComponent], w: &Window) -> String {
    let px = 600.0;
    let s = px / (2.0 * w.r);
    let tx = |x: f64| (x - (w.c1 - w.r)) * s;
    let ty = |z: f64| px - (z - (w.c3 - w.r)) * s;
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{px}" height="{px}" viewBox="0 0 {px} {px}">"#);
    let _ = writeln!(out, r##"<rect width="{px}" height="{px}" fill="#ffffff"/>"##);
    let _ = writeln!(out, r##"<g stroke="#d8d8d8" stroke-width="0.5">"##);
    for k in (w.c1 - w.r).ceil() as i64..=(w.c1 + w.r).floor() as i64 {
        let x = tx(k as f64);
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="0" x2="{x:.2}" y2="{px}"/>"#);
    }
    for k in (w.c3 - w.r).ceil() as i64..=(w.c3 + w.r).floor() as i64 {
        let y = ty(k as f64);
        let _ = writeln!(out, r#"<line x1="0" y1="{y:.2}" x2="{px}" y2="{y:.2}"/>"#);
    }
    out.push_str("</g>\n");
    for c in components {
        let color = match c.window_class {
            WindowClass::Spanning => "#000000",
            WindowClass::BoundaryClipped => "#404040",
            WindowClass::Closed => "#b00000",
        };
        for line in &c.polylines {
            let pts: Vec<String> = line.iter().map(|p| format!("{:.2},{:.2}", tx(p[0]), ty(p[1]))).collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2.5" stroke-linejoin="round" points="{}"/>"#,
                pts.join(" ")
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Components with chains and labels, plus the census.
pub fn section_json(level: f64, w: &Window, eps: f64, components: &[SectionComponent]) -> Value {
    json!({
        "level": level,
        "window": w,
        "eps": eps,
        "census": component_census(components, w.r),
        "components": components,
    })
}
