use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::{detect_period, find_attracting_cycles, CycleAtlas};
use crate::algebra::ComplexFloat;
use crate::error::{Error, Result};
use crate::ratmap::{critical_data, Mode, NumPoint, NumericMap, RationalMap};

/// Rectangle in the plane: `center ± half_width` horizontally, height scaled by the aspect ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub center: (f64, f64),
    pub half_width: f64,
}

impl Window {
    pub fn new(re: f64, im: f64, half_width: f64) -> Self {
        Window { center: (re, im), half_width }
    }
}

#[derive(Clone, Debug)]
pub enum Target {
    Julia { map: RationalMap, window: Window },
    /// `f_a(z) = (z² − a)/(z² + a)`, pixels are values of `a`.
    ParamFa { window: Window },
    /// `f_c(z) = c(z + 1/z)`, pixels are values of `c`.
    ParamSigma2 { window: Window },
}

impl Target {
    pub fn window(&self) -> Window {
        match self {
            Target::Julia { window, .. } | Target::ParamFa { window } | Target::ParamSigma2 { window } => *window,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Target::Julia { .. } => "julia",
            Target::ParamFa { .. } => "param_fa",
            Target::ParamSigma2 { .. } => "param_sigma2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Palette {
    Spectral,
    Gray,
}

impl Palette {
    pub fn name(self) -> &'static str {
        match self {
            Palette::Spectral => "spectral",
            Palette::Gray => "gray",
        }
    }

    pub fn parse(s: &str) -> Option<Palette> {
        match s {
            "spectral" => Some(Palette::Spectral),
            "gray" | "grey" => Some(Palette::Gray),
            _ => None,
        }
    }

    /// Color of class `class` at brightness `v ∈ [0, 1]`. Negative classes are black.
    fn color(self, class: i32, v: f64) -> [u8; 3] {
        if class < 0 {
            return [0, 0, 0];
        }
        match self {
            Palette::Spectral => {
                let h = (class as f64 * 0.618_033_988_75 + 0.1).fract();
                hsv(h, 0.7, v)
            }
            Palette::Gray => {
                let g = (0.35 + 0.65 * ((class % 6) as f64 + 1.0) / 6.0) * v;
                let b = (255.0 * g).round() as u8;
                [b, b, b]
            }
        }
    }
}

fn hsv(h: f64, s: f64, v: f64) -> [u8; 3] {
    let i = (h * 6.0).floor();
    let f = h * 6.0 - i;
    let (p, q, t) = (v * (1.0 - s), v * (1.0 - f * s), v * (1.0 - (1.0 - f) * s));
    let (r, g, b) = match i as i32 % 6 {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [(r * 255.0).round() as u8, (g * 255.0).round() as u8, (b * 255.0).round() as u8]
}

#[derive(Clone, Debug)]
pub struct RenderSpec {
    pub target: Target,
    pub width: usize,
    pub height: usize,
    pub max_iter: usize,
    pub cycle_eps: f64,
    pub max_period: usize,
    pub palette: Palette,
    pub overlay_critical_orbits: bool,
}

impl RenderSpec {
    fn with_target(target: Target) -> Self {
        RenderSpec {
            target,
            width: 256,
            height: 256,
            max_iter: 256,
            cycle_eps: 1e-6,
            max_period: 16,
            palette: Palette::Spectral,
            overlay_critical_orbits: false,
        }
    }

    pub fn julia(map: RationalMap) -> Self {
        Self::with_target(Target::Julia { map, window: Window::new(0.0, 0.0, 2.0) })
    }

    pub fn param_fa() -> Self {
        Self::with_target(Target::ParamFa { window: Window::new(0.0, 0.0, 4.0) })
    }

    pub fn param_sigma2() -> Self {
        Self::with_target(Target::ParamSigma2 { window: Window::new(0.0, 0.0, 2.0) })
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidArgument("width and height must be at least 1".into()));
        }
        if !(self.cycle_eps > 0.0) {
            return Err(Error::InvalidArgument("cycle_eps must be positive".into()));
        }
        if self.max_period == 0 {
            return Err(Error::InvalidArgument("max_period must be at least 1".into()));
        }
        let w = self.target.window();
        if !(w.half_width > 0.0) || !w.center.0.is_finite() || !w.center.1.is_finite() {
            return Err(Error::InvalidArgument("window needs a finite center and positive half-width".into()));
        }
        if let Target::Julia { map, .. } = &self.target {
            if map.degree() < 2 {
                return Err(Error::InvalidArgument("julia target needs degree at least 2".into()));
            }
        }
        Ok(())
    }

    /// Plane coordinate of the center of pixel `(i, j)`, row 0 at the top.
    pub fn pixel(&self, i: usize, j: usize) -> ComplexFloat {
        let w = self.target.window();
        let half_h = w.half_width * self.height as f64 / self.width as f64;
        let x = w.center.0 + (2.0 * (i as f64 + 0.5) / self.width as f64 - 1.0) * w.half_width;
        let y = w.center.1 + (1.0 - 2.0 * (j as f64 + 0.5) / self.height as f64) * half_h;
        ComplexFloat::new(x, y)
    }

    fn locate(&self, z: &NumPoint) -> Option<(usize, usize)> {
        let NumPoint::Finite(z) = z else { return None };
        let w = self.target.window();
        let half_h = w.half_width * self.height as f64 / self.width as f64;
        let u = ((z.re - w.center.0) / w.half_width + 1.0) / 2.0 * self.width as f64;
        let v = (1.0 - (z.im - w.center.1) / half_h) / 2.0 * self.height as f64;
        (u >= 0.0 && v >= 0.0 && u < self.width as f64 && v < self.height as f64).then(|| (u as usize, v as usize))
    }

    pub fn to_json(&self) -> Value {
        let w = self.target.window();
        let mut v = json!({
            "target": self.target.name(),
            "window": { "center": [w.center.0, w.center.1], "half_width": w.half_width },
            "width": self.width,
            "height": self.height,
            "max_iter": self.max_iter,
            "cycle_eps": self.cycle_eps,
            "max_period": self.max_period,
            "palette": self.palette.name(),
            "overlay_critical_orbits": self.overlay_critical_orbits,
        });
        if let Target::Julia { map, .. } = &self.target {
            v["map"] = json!(map.to_string());
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct RenderOutput {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB, top row first.
    pub rgb: Vec<u8>,
    /// Class per pixel: cycle index (julia) or attracting period (parameter planes); −1 when unresolved.
    pub classes: Vec<i32>,
    pub atlas: Option<CycleAtlas>,
    pub overlay: Vec<NumPoint>,
    pub threads: usize,
    pub elapsed_ms: u128,
}

impl RenderOutput {
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.rgb);
        out
    }

    pub fn to_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            let mut writer = enc.write_header().map_err(|e| Error::Internal(format!("png: {e}")))?;
            writer.write_image_data(&self.rgb).map_err(|e| Error::Internal(format!("png: {e}")))?;
        }
        Ok(out)
    }

    /// Pixel count per class, ascending by class.
    pub fn class_counts(&self) -> Vec<(i32, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for &c in &self.classes {
            *counts.entry(c).or_insert(0usize) += 1;
        }
        counts.into_iter().collect()
    }

    pub fn metadata(&self, spec: &RenderSpec) -> Value {
        let atlas = self.atlas.as_ref().map(|a| {
            a.cycles
                .iter()
                .map(|c| {
                    json!({
                        "period": c.period,
                        "multiplier": c.multiplier,
                        "points": c.points.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect::<Vec<_>>()
        });
        json!({
            "spec": spec.to_json(),
            "atlas": atlas,
            "class_counts": self.class_counts().iter().map(|(c, n)| json!({"class": c, "pixels": n})).collect::<Vec<_>>(),
            "overlay": self.overlay.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "timing": { "elapsed_ms": self.elapsed_ms as u64, "threads": self.threads },
        })
    }
}

fn fa_map(a: ComplexFloat) -> NumericMap {
    let (one, zero) = (ComplexFloat::new(1.0, 0.0), ComplexFloat::new(0.0, 0.0));
    NumericMap::from_coeffs(vec![-a, zero, one], vec![a, zero, one], 53)
}

fn sigma2_map(c: ComplexFloat) -> NumericMap {
    let zero = ComplexFloat::new(0.0, 0.0);
    NumericMap::from_coeffs(vec![c, zero, c], vec![zero, ComplexFloat::new(1.0, 0.0)], 53)
}

/// Attracting period of the orbit of `seed`, or −1.
fn orbit_period(f: &NumericMap, seed: NumPoint, spec: &RenderSpec) -> i32 {
    let mut z = seed;
    for _ in 0..spec.max_iter {
        z = f.eval(&z);
    }
    match detect_period(f, &z, spec.max_period, spec.cycle_eps) {
        Some(p) => p as i32,
        None => -1,
    }
}

fn shade(n: usize, max_iter: usize) -> f64 {
    let t = (1.0 + n as f64).ln() / (1.0 + max_iter as f64).ln();
    1.0 - 0.75 * t
}

fn classify_julia(f: &NumericMap, atlas: &CycleAtlas, z0: ComplexFloat, spec: &RenderSpec) -> (i32, f64) {
    let mut z = NumPoint::Finite(z0);
    for n in 0..=spec.max_iter {
        for (k, c) in atlas.cycles.iter().enumerate() {
            if c.points.iter().any(|p| p.dist(&z) < spec.cycle_eps) {
                return (k as i32, shade(n, spec.max_iter));
            }
        }
        z = f.eval(&z);
    }
    (-1, 0.0)
}

/// Distinct points on the critical orbits once the transient has died out.
fn critical_orbit_marks(f: &NumericMap, crit: &[NumPoint]) -> Vec<NumPoint> {
    let mut marks: Vec<NumPoint> = Vec::new();
    for c in crit {
        let mut z = c.clone();
        for _ in 0..256 {
            z = f.eval(&z);
        }
        for _ in 0..64 {
            if !marks.iter().any(|m| m.dist(&z) < 1e-3) {
                marks.push(z.clone());
            }
            z = f.eval(&z);
        }
    }
    marks
}

fn threads_from_env() -> Option<usize> {
    std::env::var("DECKMAP_THREADS").ok()?.trim().parse::<usize>().ok().filter(|&n| n > 0)
}

/// Renders `spec`, capping workers at `DECKMAP_THREADS` when it is set.
pub fn render(spec: &RenderSpec) -> Result<RenderOutput> {
    render_with_threads(spec, threads_from_env())
}

/// Renders `spec` on `threads` workers (default: one per core). The output does not depend on the worker count.
pub fn render_with_threads(spec: &RenderSpec, threads: Option<usize>) -> Result<RenderOutput> {
    spec.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let mut out = pool.install(|| render_inner(spec))?;
    out.threads = pool.current_num_threads();
    out.elapsed_ms = start.elapsed().as_millis();
    Ok(out)
}

fn render_inner(spec: &RenderSpec) -> Result<RenderOutput> {
    let (w, h) = (spec.width, spec.height);
    let mut atlas = None;
    let mut overlay = Vec::new();
    let rows: Vec<Vec<(i32, [u8; 3])>> = match &spec.target {
        Target::Julia { map, .. } => {
            let f = map.to_numeric::<f64>(53);
            let crit: Vec<NumPoint> =
                critical_data(map, Mode::Numeric)?.points.iter().map(|(c, _)| c.approx()).collect();
            let a = find_attracting_cycles(&f, &crit, spec.max_iter.max(256), spec.max_period, spec.cycle_eps);
            if spec.overlay_critical_orbits {
                overlay = critical_orbit_marks(&f, &crit);
            }
            let rows = (0..h)
                .into_par_iter()
                .map(|j| {
                    (0..w)
                        .map(|i| {
                            let (k, v) = classify_julia(&f, &a, spec.pixel(i, j), spec);
                            (k, spec.palette.color(k, v))
                        })
                        .collect()
                })
                .collect();
            atlas = Some(a);
            rows
        }
        Target::ParamFa { .. } | Target::ParamSigma2 { .. } => {
            let fa = matches!(spec.target, Target::ParamFa { .. });
            (0..h)
                .into_par_iter()
                .map(|j| {
                    (0..w)
                        .map(|i| {
                            let p = spec.pixel(i, j);
                            let k = if fa {
                                orbit_period(&fa_map(p), NumPoint::Finite(ComplexFloat::new(-1.0, 0.0)), spec)
                            } else {
                                orbit_period(&sigma2_map(p), NumPoint::Finite(ComplexFloat::new(1.0, 0.0)), spec)
                            };
                            (k, spec.palette.color(k, 1.0))
                        })
                        .collect()
                })
                .collect()
        }
    };
    let mut classes = Vec::with_capacity(w * h);
    let mut rgb = Vec::with_capacity(3 * w * h);
    for row in rows {
        for (k, c) in row {
            classes.push(k);
            rgb.extend_from_slice(&c);
        }
    }
    for m in &overlay {
        if let Some((u, v)) = spec.locate(m) {
            for dy in -2i64..=2 {
                for dx in -2i64..=2 {
                    let (x, y) = (u as i64 + dx, v as i64 + dy);
                    if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
                        let o = 3 * (y as usize * w + x as usize);
                        rgb[o..o + 3].copy_from_slice(&[255, 255, 255]);
                    }
                }
            }
        }
    }
    Ok(RenderOutput { width: w, height: h, rgb, classes, atlas, overlay, threads: 0, elapsed_ms: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> RationalMap {
        RationalMap::from_ints(&[0, 0, 1], &[1]).unwrap()
    }

    #[test]
    fn square_map_has_two_classes() {
        let mut spec = RenderSpec::julia(square());
        spec.width = 48;
        spec.height = 32;
        let out = render_with_threads(&spec, Some(2)).unwrap();
        let counts = out.class_counts();
        let classes: Vec<i32> = counts.iter().map(|c| c.0).filter(|&c| c >= 0).collect();
        assert_eq!(classes, vec![0, 1]);
        let ppm = out.to_ppm();
        assert!(ppm.starts_with(b"P6\n48 32\n255\n"));
        assert_eq!(ppm.len(), "P6\n48 32\n255\n".len() + 48 * 32 * 3);
        let png = out.to_png().unwrap();
        assert_eq!(&png[1..4], b"PNG");
    }

    #[test]
    fn palette_changes_colors_only() {
        let mut spec = RenderSpec::param_sigma2();
        spec.width = 24;
        spec.height = 24;
        let a = render_with_threads(&spec, Some(1)).unwrap();
        spec.palette = Palette::Gray;
        let b = render_with_threads(&spec, Some(3)).unwrap();
        assert_eq!(a.classes, b.classes);
        assert_ne!(a.rgb, b.rgb);
    }

    #[test]
    fn pixel_grid_round_trip() {
        let mut spec = RenderSpec::param_fa();
        spec.width = 20;
        spec.height = 10;
        for (i, j) in [(0, 0), (19, 9), (7, 3)] {
            assert_eq!(spec.locate(&NumPoint::Finite(spec.pixel(i, j))), Some((i, j)));
        }
        assert!((spec.pixel(10, 5).re - 0.2).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs() {
        let mut spec = RenderSpec::param_fa();
        spec.width = 0;
        assert!(spec.validate().is_err());
        let mut spec = RenderSpec::param_fa();
        spec.max_period = 0;
        assert!(spec.validate().is_err());
    }
}
