use std::fmt::Write;

use crate::exact_geometry::{to_significant, Polygon2, Rational};

/// SVG 1.1 drawing of a polygon in the shadow plane. Coordinates are the
/// exact vertex coordinates rounded to 12 significant digits; the y axis is
/// flipped so that it points up.
pub fn shadow_svg(polygon: &Polygon2, title: &str) -> String {
    let fmt = |r: &Rational| to_significant(r, 12);
    let xs = polygon.vertices().iter().map(|v| &v[0]);
    let ys = polygon.vertices().iter().map(|v| &v[1]);
    let (min_x, max_x) = (
        xs.clone().min().expect("nonempty"),
        xs.max().expect("nonempty"),
    );
    let (min_y, max_y) = (
        ys.clone().min().expect("nonempty"),
        ys.max().expect("nonempty"),
    );
    let width = max_x - min_x;
    let height = max_y - min_y;
    let pad = width.clone().max(height.clone()) / Rational::from_integer(20.into());
    let view = [
        fmt(&(min_x - &pad)),
        fmt(&(-(max_y + &pad))),
        fmt(&(&width + &pad * Rational::from_integer(2.into()))),
        fmt(&(&height + &pad * Rational::from_integer(2.into()))),
    ];
    let points: Vec<String> = polygon
        .vertices()
        .iter()
        .map(|v| format!("{},{}", fmt(&v[0]), fmt(&-&v[1])))
        .collect();

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="640" height="640" viewBox="{}">"#,
        view.join(" ")
    );
    let _ = writeln!(out, "  <title>{title}</title>");
    let _ = writeln!(
        out,
        r##"  <polygon points="{}" fill="#dde6f3" stroke="#1f3b73" stroke-width="1" vector-effect="non-scaling-stroke"/>"##,
        points.join(" ")
    );
    for p in &points {
        let (x, y) = p.split_once(',').expect("formatted above");
        let _ = writeln!(
            out,
            r##"  <circle cx="{x}" cy="{y}" r="{}" fill="#1f3b73"/>"##,
            fmt(&(&pad / Rational::from_integer(8.into())))
        );
    }
    out.push_str("</svg>\n");
    out
}
