//! Seeded sample points inside a metric's sampling region, and regular z-grids.

use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::metric::MetricSpec;
use crate::point::{parse_complex, Point, PointParseError};

/// Attempts allowed per requested point before giving up.
pub const OVERSAMPLING: usize = 100;

fn draw(spec: &MetricSpec, rng: &mut ChaCha8Rng) -> Point {
    let r = &spec.region;
    let z = r
        .z_box
        .map(|[a, b, c, d]| Complex64::new(rng.random_range(a..=b), rng.random_range(c..=d)));
    let eta = [0, 1].map(|_| {
        let e = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        if e.norm() < r.eta_floor {
            if e.norm() == 0.0 {
                Complex64::new(r.eta_floor, 0.0)
            } else {
                e * (r.eta_floor / e.norm())
            }
        } else {
            e
        }
    });
    Point { z, eta }
}

/// Spectral condition number of the Hermitian matrix `g_{ij̄}` at the base point.
pub fn condition_number(geo: &Geometry) -> f64 {
    let tr = geo.g[0][0].value().re + geo.g[1][1].value().re;
    let det = geo.det.value().re;
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let hi = (tr + disc) / 2.0;
    hi * hi / det
}

fn admitted(spec: &MetricSpec, p: &Point) -> bool {
    p.eta_norm() > 0.0
        && spec.region.inside_margin(p)
        && spec.check_domain(p).is_ok()
        && spec.eval_plain(p).is_ok()
        && Geometry::new(spec, p, 3)
            .is_ok_and(|g| condition_number(&g) <= spec.region.max_condition)
}

/// `count` admitted points drawn from `spec.region` with a ChaCha8 stream seeded by `seed`.
pub fn sample_points(spec: &MetricSpec, count: usize, seed: u64) -> Result<Vec<Point>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let budget = count.max(1) * OVERSAMPLING;
    for _ in 0..budget {
        if out.len() == count {
            break;
        }
        let p = draw(spec, &mut rng);
        if admitted(spec, &p) {
            out.push(p);
        }
    }
    if out.len() < count {
        return Err(Error::Sampling(format!(
            "only {} of {count} points admitted after {budget} draws for '{}'",
            out.len(),
            spec.name
        )));
    }
    Ok(out)
}

/// One grid axis: a fixed value or `n` evenly spaced values from `a` to `b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl Axis {
    pub fn fixed(v: f64) -> Axis {
        Axis {
            from: v,
            to: v,
            steps: 1,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.from];
        }
        let h = (self.to - self.from) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.from + h * k as f64).collect()
    }
}

impl FromStr for Axis {
    type Err = PointParseError;

    /// `v` or `a:b:n`
    fn from_str(s: &str) -> std::result::Result<Axis, PointParseError> {
        let bad = || PointParseError(format!("bad grid axis '{s}' (expected v or a:b:n)"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [v] => Ok(Axis::fixed(v.parse().map_err(|_| bad())?)),
            [a, b, n] => {
                let steps: usize = n.parse().map_err(|_| bad())?;
                if steps == 0 {
                    return Err(bad());
                }
                Ok(Axis {
                    from: a.parse().map_err(|_| bad())?,
                    to: b.parse().map_err(|_| bad())?,
                    steps,
                })
            }
            _ => Err(bad()),
        }
    }
}

/// Regular grid over the real and imaginary parts of `z1`, `z2` at a fixed `η`.
///
/// Text form: `z1=RE,IM; z2=RE,IM; eta=e1,e2` where each `RE`/`IM` is an [`Axis`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    /// `[re z1, im z1, re z2, im z2]`
    pub axes: [Axis; 4],
    pub eta: [Complex64; 2],
}

impl Grid {
    /// Points in row-major order, `im z2` varying fastest.
    pub fn points(&self) -> Vec<Point> {
        let v = self.axes.map(|a| a.values());
        let mut out = Vec::new();
        for &a in &v[0] {
            for &b in &v[1] {
                for &c in &v[2] {
                    for &d in &v[3] {
                        out.push(Point {
                            z: [Complex64::new(a, b), Complex64::new(c, d)],
                            eta: self.eta,
                        });
                    }
                }
            }
        }
        out
    }
}

impl FromStr for Grid {
    type Err = PointParseError;

    fn from_str(s: &str) -> std::result::Result<Grid, PointParseError> {
        let mut axes = [Axis::fixed(0.0); 4];
        let mut eta = None;
        for field in s.split(';').map(str::trim).filter(|f| !f.is_empty()) {
            let (key, val) = field
                .split_once('=')
                .ok_or_else(|| PointParseError(format!("missing '=' in '{field}'")))?;
            let pair: Vec<&str> = val.split(',').collect();
            if pair.len() != 2 {
                return Err(PointParseError(format!(
                    "expected two comma-separated values in '{val}'"
                )));
            }
            match key.trim() {
                "z1" => {
                    axes[0] = pair[0].parse()?;
                    axes[1] = pair[1].parse()?;
                }
                "z2" => {
                    axes[2] = pair[0].parse()?;
                    axes[3] = pair[1].parse()?;
                }
                "eta" => eta = Some([parse_complex(pair[0])?, parse_complex(pair[1])?]),
                k => return Err(PointParseError(format!("unknown grid key '{k}'"))),
            }
        }
        let eta = eta.ok_or_else(|| PointParseError("grid needs eta=".into()))?;
        Ok(Grid { axes, eta })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_admitted() {
        let m = MetricSpec::builtin("hartogs-kropina", &[]).unwrap();
        let a = sample_points(&m, 10, 7).unwrap();
        let b = sample_points(&m, 10, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_points(&m, 10, 8).unwrap());
        for p in &a {
            assert!(m.check_domain(p).is_ok() && m.region.inside_margin(p));
            let g = Geometry::new(&m, p, 3).unwrap();
            assert!(condition_number(&g) <= m.region.max_condition);
        }
    }

    #[test]
    fn antonelli_shimada_eta_floor() {
        let m = MetricSpec::builtin("antonelli-shimada", &[("sigma".into(), "0".into())]).unwrap();
        for p in sample_points(&m, 50, 3).unwrap() {
            assert!(p.eta[0].norm() >= 1e-3 - 1e-15 && p.eta[1].norm() >= 1e-3 - 1e-15);
        }
    }

    #[test]
    fn impossible_region_fails() {
        let mut m = MetricSpec::builtin("euclidean", &[]).unwrap();
        m.region = m.region.clone().with_margin(|_| false);
        assert!(matches!(sample_points(&m, 3, 1), Err(Error::Sampling(_))));
    }

    #[test]
    fn grid_parse_and_order() {
        let g: Grid = "z1=0.3:0.5:3,0; z2=0.1,-0.2:0.2:2; eta=1,i"
            .parse()
            .unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(
            pts[0].z,
            [Complex64::new(0.3, 0.0), Complex64::new(0.1, -0.2)]
        );
        assert_eq!(pts[1].z[1], Complex64::new(0.1, 0.2));
        assert!((pts[5].z[0].re - 0.5).abs() < 1e-15);
        assert_eq!(pts[0].eta[1], Complex64::new(0.0, 1.0));
        assert!("z1=0:1:0,0; eta=1,0".parse::<Grid>().is_err());
        assert!("z1=0,0".parse::<Grid>().is_err());
    }
}
