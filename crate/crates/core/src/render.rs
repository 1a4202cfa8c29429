//! Disk images: the images of concentric circles and radial rays under a map,
//! written as SVG paths or a PPM raster.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::membership::par_map;
use crate::series::HarmonicMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderFormat {
    Svg,
    Ppm,
}

impl FromStr for RenderFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svg" => Ok(Self::Svg),
            "ppm" => Ok(Self::Ppm),
            other => domain(format!("unknown render format `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    /// Circles at radii `k / circles`, `k = 1..=circles`; the last is the boundary.
    pub circles: usize,
    pub rays: usize,
    pub samples_per_curve: usize,
    pub format: RenderFormat,
    /// Side of the square image in pixels.
    pub size: usize,
}

impl RenderSpec {
    pub fn new(circles: usize, rays: usize, samples_per_curve: usize, format: RenderFormat) -> Result<Self> {
        let spec = Self { circles, rays, samples_per_curve, format, size: 512 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.circles < 2 {
            return domain("render needs at least 2 circles");
        }
        if self.rays < 4 {
            return domain("render needs at least 4 rays");
        }
        if self.samples_per_curve < 64 {
            return domain("render needs at least 64 samples per curve");
        }
        if !(16..=8192).contains(&self.size) {
            return domain("image size must lie in 16..=8192");
        }
        Ok(())
    }
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self::new(8, 16, 256, RenderFormat::Svg).expect("valid defaults")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Circle,
    Ray,
    Boundary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub kind: CurveKind,
    /// Radius for circles, angle for rays.
    pub parameter: f64,
    pub closed: bool,
    pub points: Vec<Complex64>,
}

/// Image curves, circles first, then rays, then the boundary.
pub fn curves(f: &HarmonicMap, spec: &RenderSpec) -> Vec<Curve> {
    let n = spec.samples_per_curve;
    let mut out = Vec::with_capacity(spec.circles + spec.rays);
    let circle = |r: f64| -> Vec<Complex64> {
        let ks: Vec<usize> = (0..n).collect();
        par_map(&ks, |&k| f.eval_unchecked(Complex64::from_polar(r, TAU * k as f64 / n as f64)))
    };
    for k in 1..spec.circles {
        let r = k as f64 / spec.circles as f64;
        out.push(Curve { kind: CurveKind::Circle, parameter: r, closed: true, points: circle(r) });
    }
    for j in 0..spec.rays {
        let angle = TAU * j as f64 / spec.rays as f64;
        let ks: Vec<usize> = (0..n).collect();
        let points = par_map(&ks, |&k| f.eval_unchecked(Complex64::from_polar(k as f64 / (n - 1) as f64, angle)));
        out.push(Curve { kind: CurveKind::Ray, parameter: angle, closed: false, points });
    }
    out.push(Curve { kind: CurveKind::Boundary, parameter: 1.0, closed: true, points: circle(1.0) });
    out
}

/// Polygonal length of a closed curve.
pub fn closed_length(points: &[Complex64]) -> f64 {
    let n = points.len();
    (0..n).map(|k| (points[(k + 1) % n] - points[k]).norm()).sum()
}

struct Bounds {
    min: Complex64,
    max: Complex64,
}

impl Bounds {
    fn of(curves: &[Curve]) -> Self {
        let mut min = Complex64::new(f64::INFINITY, f64::INFINITY);
        let mut max = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in curves.iter().flat_map(|c| &c.points) {
            min = Complex64::new(min.re.min(p.re), min.im.min(p.im));
            max = Complex64::new(max.re.max(p.re), max.im.max(p.im));
        }
        // square box with a 5% margin
        let center = (min + max) * 0.5;
        let half = 0.525 * (max.re - min.re).max(max.im - min.im).max(1e-9);
        let d = Complex64::new(half, half);
        Self { min: center - d, max: center + d }
    }

    fn side(&self) -> f64 {
        self.max.re - self.min.re
    }
}

fn style(kind: CurveKind) -> (&'static str, &'static str, f64) {
    match kind {
        CurveKind::Circle => ("circle", "#3b6ea8", 1.0),
        CurveKind::Ray => ("ray", "#a8583b", 1.0),
        CurveKind::Boundary => ("boundary", "#000000", 2.0),
    }
}

/// SVG 1.1 document; coordinates are printed with six decimals and the
/// y axis points up.
pub fn render_svg(curves: &[Curve], size: usize) -> String {
    let b = Bounds::of(curves);
    let side = b.side();
    let stroke = side / 400.0;
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{size}\" height=\"{size}\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">",
        b.min.re, -b.max.im, side, side
    );
    s.push_str("<g transform=\"scale(1,-1)\" fill=\"none\" stroke-linejoin=\"round\">\n");
    for c in curves {
        let (class, color, width) = style(c.kind);
        let _ = write!(s, "<path class=\"{class}\" stroke=\"{color}\" stroke-width=\"{:.6}\" d=\"", stroke * width);
        for (i, p) in c.points.iter().enumerate() {
            let _ = write!(s, "{}{:.6} {:.6}", if i == 0 { "M" } else { " L" }, p.re, p.im);
        }
        s.push_str(if c.closed { " Z\"/>\n" } else { "\"/>\n" });
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// Binary PPM (P6) raster on a white background.
pub fn render_ppm(curves: &[Curve], size: usize) -> Vec<u8> {
    let b = Bounds::of(curves);
    let scale = size as f64 / b.side();
    let mut pixels = vec![255u8; size * size * 3];
    let to_px = |p: Complex64| ((p.re - b.min.re) * scale, (b.max.im - p.im) * scale);
    let mut plot = |x: f64, y: f64, rgb: [u8; 3]| {
        let (i, j) = (x.floor(), y.floor());
        if i >= 0.0 && j >= 0.0 && (i as usize) < size && (j as usize) < size {
            let at = (j as usize * size + i as usize) * 3;
            pixels[at..at + 3].copy_from_slice(&rgb);
        }
    };
    for c in curves {
        let (_, color, _) = style(c.kind);
        let rgb = parse_color(color);
        let n = c.points.len();
        let segments = if c.closed { n } else { n - 1 };
        for k in 0..segments {
            let (x0, y0) = to_px(c.points[k]);
            let (x1, y1) = to_px(c.points[(k + 1) % n]);
            let steps = ((x1 - x0).abs().max((y1 - y0).abs()) * 2.0).ceil().max(1.0) as usize;
            for s in 0..=steps {
                let t = s as f64 / steps as f64;
                plot(x0 + t * (x1 - x0), y0 + t * (y1 - y0), rgb);
            }
        }
    }
    let mut out = format!("P6\n{size} {size}\n255\n").into_bytes();
    out.extend_from_slice(&pixels);
    out
}

fn parse_color(hex: &str) -> [u8; 3] {
    let v = u32::from_str_radix(&hex[1..], 16).expect("static color");
    [(v >> 16) as u8, (v >> 8) as u8, v as u8]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderSummary {
    /// Polygonal length of the rendered boundary image.
    pub boundary_length: f64,
    pub bytes: usize,
}

/// Renders `f` to bytes in the requested format.
pub fn render(f: &HarmonicMap, spec: &RenderSpec) -> Result<(Vec<u8>, RenderSummary)> {
    spec.validate()?;
    let cs = curves(f, spec);
    if cs.iter().flat_map(|c| &c.points).any(|p| !(p.re.is_finite() && p.im.is_finite())) {
        return domain("map values overflow on the closed disk");
    }
    let boundary = cs.last().expect("boundary curve");
    let boundary_length = closed_length(&boundary.points);
    let bytes = match spec.format {
        RenderFormat::Svg => render_svg(&cs, spec.size).into_bytes(),
        RenderFormat::Ppm => render_ppm(&cs, spec.size),
    };
    let summary = RenderSummary { boundary_length, bytes: bytes.len() };
    Ok((bytes, summary))
}

pub fn render_to_file(f: &HarmonicMap, spec: &RenderSpec, path: &Path) -> Result<RenderSummary> {
    let (bytes, summary) = render(f, spec)?;
    std::fs::write(path, bytes)?;
    Ok(summary)
}
