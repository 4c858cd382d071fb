//! The standard apartment as the tiling of the Poincare disk by regular
//! right-angled `r`-gons. Chamber `w = s_{i_1} ... s_{i_k}` is drawn at
//! `R_{i_1}(... R_{i_k}(P_0))`, with `R_i` the inversion in side `i` of the
//! fundamental polygon `P_0`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use super::{Building, Chamber};
use crate::error::{Error, Result};
use crate::rootdata::Gcm;
use crate::weyl::{enumerate_ball, WeylElement, DEFAULT_ELEMENT_LIMIT};

const ARC_SAMPLES: usize = 8;
const DEDUP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    fn dist(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

/// A side of `P_0`: the geodesic through vertices `k` and `k+1`, a circle
/// orthogonal to the unit circle.
#[derive(Clone, Copy, Debug)]
struct Side {
    center: Point,
    radius: f64,
}

impl Side {
    fn invert(&self, z: Point) -> Point {
        let (dx, dy) = (z.x - self.center.x, z.y - self.center.y);
        let k = self.radius * self.radius / (dx * dx + dy * dy);
        Point { x: self.center.x + k * dx, y: self.center.y + k * dy }
    }
}

fn vertex_radius(r: usize) -> f64 {
    let cot = 1.0 / (PI / r as f64).tan();
    (cot.acosh() / 2.0).tanh()
}

fn vertex(r: usize, k: usize) -> Point {
    let rho = vertex_radius(r);
    let a = 2.0 * PI * (k % r) as f64 / r as f64;
    Point { x: rho * a.cos(), y: rho * a.sin() }
}

fn side(r: usize, k: usize) -> Side {
    let rho = vertex_radius(r);
    let d = (1.0 + rho * rho) / (2.0 * rho * (PI / r as f64).cos());
    let a = 2.0 * PI * (k as f64 + 0.5) / r as f64;
    Side { center: Point { x: d * a.cos(), y: d * a.sin() }, radius: (d * d - 1.0).sqrt() }
}

/// Boundary of `P_0`, sampled along its geodesic sides, counterclockwise.
pub fn fundamental_polygon(r: usize) -> Vec<Point> {
    let mut pts = Vec::with_capacity(r * ARC_SAMPLES);
    for k in 0..r {
        let s = side(r, k);
        let (a, b) = (vertex(r, k), vertex(r, k + 1));
        let ta = (a.y - s.center.y).atan2(a.x - s.center.x);
        let mut tb = (b.y - s.center.y).atan2(b.x - s.center.x);
        // the short arc, which is the one inside the disk
        while tb - ta > PI {
            tb -= 2.0 * PI;
        }
        while ta - tb > PI {
            tb += 2.0 * PI;
        }
        for j in 0..ARC_SAMPLES {
            let t = ta + (tb - ta) * j as f64 / ARC_SAMPLES as f64;
            pts.push(Point { x: s.center.x + s.radius * t.cos(), y: s.center.y + s.radius * t.sin() });
        }
    }
    pts
}

#[derive(Clone, Debug, Serialize)]
pub struct Placement {
    pub word: Vec<usize>,
    pub polygon: Vec<Point>,
}

impl Placement {
    fn of(r: usize, w: &WeylElement) -> Placement {
        let sides: Vec<Side> = (0..r).map(|k| side(r, k)).collect();
        let polygon = fundamental_polygon(r)
            .into_iter()
            .map(|p| w.word().iter().rev().fold(p, |z, &i| sides[i].invert(z)))
            .collect();
        Placement { word: w.word().to_vec(), polygon }
    }

    /// Average of the first vertex of every side; distinguishes tiles.
    pub fn anchor(&self) -> Point {
        let n = self.polygon.len() / ARC_SAMPLES;
        let (sx, sy) = (0..n).map(|k| self.polygon[k * ARC_SAMPLES]).fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
        Point { x: sx / n as f64, y: sy / n as f64 }
    }
}

/// Tiles for all Weyl elements of length at most `depth`, grouped by length.
/// Coincident tiles are rejected as an internal error.
pub fn place_ball(r: usize, depth: usize) -> Result<Vec<Vec<Placement>>> {
    let gcm = Gcm::right_angled(r, -2)?;
    let layers = enumerate_ball(&gcm, depth, DEFAULT_ELEMENT_LIMIT)?;
    let placed: Vec<Vec<Placement>> = layers.iter().map(|l| l.iter().map(|w| Placement::of(r, w)).collect()).collect();
    let mut anchors: Vec<(Point, &[usize])> = Vec::new();
    for p in placed.iter().flatten() {
        let a = p.anchor();
        if let Some((_, other)) = anchors.iter().find(|(b, _)| b.dist(a) < DEDUP_TOL) {
            return Err(Error::Internal(format!("tiles {:?} and {other:?} coincide", p.word)));
        }
        anchors.push((a, &p.word));
    }
    Ok(placed)
}

/// The tile of the standard apartment that `c` retracts onto, centred at
/// the base chamber.
pub fn apartment_retraction(building: &Building, c: &Chamber) -> Result<Placement> {
    let w = building.w_distance(&Chamber::base(), c)?;
    Ok(Placement::of(building.rank(), &w))
}

/// SVG of the tiles up to `depth`: the unit circle and one `<polygon>` per
/// Weyl element.
pub fn render_svg(r: usize, depth: usize) -> Result<String> {
    let layers = place_ball(r, depth)?;
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.05 -1.05 2.1 2.1" width="800" height="800">"#)
        .unwrap();
    writeln!(s, r#"<circle cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="0.004"/>"#).unwrap();
    for (len, layer) in layers.iter().enumerate() {
        for p in layer {
            let word: Vec<String> = p.word.iter().map(|i| i.to_string()).collect();
            let pts: Vec<String> = p.polygon.iter().map(|q| format!("{:.6},{:.6}", q.x, -q.y)).collect();
            let shade = 255 - (len * 40).min(200);
            writeln!(
                s,
                r#"<polygon data-word="{}" data-length="{len}" points="{}" fill="rgb({shade},{shade},255)" stroke="black" stroke-width="0.002"/>"#,
                word.join(" "),
                pts.join(" ")
            )
            .unwrap();
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}
