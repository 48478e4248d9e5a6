//! JSON, text and SVG report emitters.

use qslope_core::Slope as Rational64;
use serde_json::{json, Value};

use qslope_core::{
    GrowthClass, GrowthKind, NewtonFunction, OrePoly, ScalarPoly, SymbolElement,
};

/// A slope as a JSON value: a number when integral, a `"num/den"` string
/// otherwise.
pub fn slope_json(mu: &Rational64) -> Value {
    if mu.is_integer() {
        json!(*mu.numer())
    } else {
        json!(format!("{}/{}", mu.numer(), mu.denom()))
    }
}

pub fn newton_json(nf: &NewtonFunction) -> Value {
    let slopes: Vec<Value> = nf
        .pairs_decreasing()
        .iter()
        .map(|(mu, r)| json!([slope_json(mu), r]))
        .collect();
    json!({ "slopes": slopes })
}

pub fn newton_text(nf: &NewtonFunction) -> String {
    let mut out = String::new();
    for (mu, r) in nf.pairs_decreasing() {
        out.push_str(&format!("slope {mu}  multiplicity {r}\n"));
    }
    out
}

/// SVG polyline of the polygon: integer lattice scaled by 40, vertices from
/// the decreasing-slope walk, slopes annotated along the edges.
pub fn newton_svg(nf: &NewtonFunction) -> String {
    let verts = qslope_core::newton::polygon_vertices(nf, (0, Rational64::from_integer(0)));
    let scale = 40.0;
    let xs: Vec<f64> = verts.iter().map(|(x, _)| *x as f64 * scale).collect();
    let ys: Vec<f64> = verts
        .iter()
        .map(|(_, y)| (*y.numer() as f64 / *y.denom() as f64) * scale)
        .collect();
    let (xmin, xmax) = (
        xs.iter().cloned().fold(f64::MAX, f64::min),
        xs.iter().cloned().fold(f64::MIN, f64::max),
    );
    let (ymin, ymax) = (
        ys.iter().cloned().fold(f64::MAX, f64::min),
        ys.iter().cloned().fold(f64::MIN, f64::max),
    );
    let pad = 30.0;
    let width = (xmax - xmin) + 2.0 * pad;
    let height = (ymax - ymin) + 2.0 * pad;
    // SVG y grows downward; flip.
    let tx = |x: f64| x - xmin + pad;
    let ty = |y: f64| (ymax - y) + pad;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    );
    let points: Vec<String> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| format!("{:.1},{:.1}", tx(*x), ty(*y)))
        .collect();
    svg.push_str(&format!(
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n",
        points.join(" ")
    ));
    for (x, y) in xs.iter().zip(&ys) {
        svg.push_str(&format!(
            "  <circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"black\"/>\n",
            tx(*x),
            ty(*y)
        ));
    }
    for (i, (mu, _)) in nf.pairs_decreasing().iter().enumerate() {
        let mx = (xs[i] + xs[i + 1]) / 2.0;
        let my = (ys[i] + ys[i + 1]) / 2.0;
        svg.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\">{}</text>\n",
            tx(mx) + 4.0,
            ty(my) - 4.0,
            mu
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn char_json(slope: i64, poly: &ScalarPoly) -> Value {
    let coeffs: Vec<Value> = poly
        .terms()
        .map(|(k, c)| json!([k, c.to_string()]))
        .collect();
    json!({ "slope": slope, "char": coeffs })
}

pub fn op_string(p: &OrePoly) -> String {
    format!("{p}")
}

pub fn growth_json(g: &GrowthClass) -> Value {
    let kind = match g.kind {
        GrowthKind::Geometric => "geometric",
        GrowthKind::QExponential => "q-exponential",
    };
    json!({ "kind": kind, "rate": g.rate })
}

/// A solution as a list of component records
/// `{cbar, theta, lq_degree, series}`.
pub fn solution_json(s: &SymbolElement) -> Value {
    let mut comps = Vec::new();
    for (key, poly) in s.components() {
        for (deg, series) in poly.iter().enumerate() {
            if series.is_zero_to_prec() {
                continue;
            }
            let coeffs: Vec<Value> = series
                .terms()
                .map(|(k, c)| json!([k, c.to_string()]))
                .collect();
            let growth = qslope_core::factor::growth_class(series)
                .ok()
                .map(|g| growth_json(&g))
                .unwrap_or(Value::Null);
            comps.push(json!({
                "cbar": key.cbar.to_string(),
                "theta": key.theta,
                "lq_degree": deg,
                "series": coeffs,
                "prec": series.prec(),
                "growth": growth,
            }));
        }
    }
    json!(comps)
}
