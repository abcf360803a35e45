//! Central finite differences as an oracle for the jet engine.
//!
//! `g_{ij̄}` comes from second differences of `L` evaluated by plain complex arithmetic.
//! `N^i_k` and `L^i_{jk}` need third derivatives of `L`; nesting three difference
//! quotients would leave roundoff of order `ε/h³`, so they are assembled in plain
//! arithmetic from first differences of `g` taken from an order-2 jet. This checks the
//! third-order jet coefficients, the inverse and every contraction independently.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::Geometry;
use crate::jet::{JetContext, Var, WJet};
use crate::metric::MetricSpec;
use crate::point::Point;

type C = Complex64;
type M2 = [[C; 2]; 2];

pub const DEFAULT_STEP: f64 = 1e-5;

/// Relative step of the second differences of `L`. Roundoff there scales like `ε/h²`,
/// so they use a longer, fourth-order stencil.
pub const SECOND_DIFF_STEP: f64 = 1e-3;

/// Deviation between jet and finite-difference values of one tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdComparison {
    pub quantity: String,
    pub max_abs_deviation: f64,
    /// `max |jet − fd| / max(1, max |jet|)` over the components.
    pub max_rel_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdReport {
    pub point: Point,
    pub step: f64,
    pub comparisons: Vec<FdComparison>,
}

impl FdReport {
    pub fn max_rel_deviation(&self) -> f64 {
        self.comparisons
            .iter()
            .map(|c| c.max_rel_deviation)
            .fold(0.0, nan_max)
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn compare(quantity: &str, jet: &[C], fd: &[C]) -> FdComparison {
    let dev = jet
        .iter()
        .zip(fd)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, nan_max);
    let scale = jet.iter().map(|a| a.norm()).fold(1.0, f64::max);
    FdComparison {
        quantity: quantity.to_string(),
        max_abs_deviation: dev,
        max_rel_deviation: dev / scale,
    }
}

/// Real coordinates `[re z1, im z1, re z2, im z2, re e1, im e1, re e2, im e2]`.
fn shifted(p: &Point, moves: &[(usize, f64)]) -> Point {
    let mut q = *p;
    for &(k, d) in moves {
        let c = if k < 4 {
            &mut q.z[k / 2]
        } else {
            &mut q.eta[(k - 4) / 2]
        };
        if k % 2 == 0 {
            c.re += d;
        } else {
            c.im += d;
        }
    }
    q
}

/// `∂²f/∂x_a∂x_b` by fourth-order central differences.
fn second(f: &dyn Fn(&Point) -> Result<C>, p: &Point, a: usize, b: usize, h: f64) -> Result<C> {
    const W: [(f64, f64); 4] = [(2.0, -1.0), (1.0, 8.0), (-1.0, -8.0), (-2.0, 1.0)];
    if a == b {
        const W2: [(f64, f64); 5] = [
            (2.0, -1.0),
            (1.0, 16.0),
            (0.0, -30.0),
            (-1.0, 16.0),
            (-2.0, -1.0),
        ];
        let mut acc = C::new(0.0, 0.0);
        for (s, w) in W2 {
            acc += w * f(&shifted(p, &[(a, s * h)]))?;
        }
        return Ok(acc / (12.0 * h * h));
    }
    let mut acc = C::new(0.0, 0.0);
    for (sa, wa) in W {
        for (sb, wb) in W {
            acc += wa * wb * f(&shifted(p, &[(a, sa * h), (b, sb * h)]))?;
        }
    }
    Ok(acc / (144.0 * h * h))
}

/// `g_{ij̄} = ∂²L/∂η^i∂η̄^j` from second differences of plain `L`.
fn metric_fd(spec: &MetricSpec, p: &Point, h: f64) -> Result<M2> {
    let f = |q: &Point| spec.eval_plain(q);
    let mut g = [[C::new(0.0, 0.0); 2]; 2];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, gij) in row.iter_mut().enumerate() {
            let (xi, yi, xj, yj) = (4 + 2 * i, 5 + 2 * i, 4 + 2 * j, 5 + 2 * j);
            let xx = second(&f, p, xi, xj, h)?;
            let yy = second(&f, p, yi, yj, h)?;
            let xy = second(&f, p, xi, yj, h)?;
            let yx = second(&f, p, yi, xj, h)?;
            // (∂_x − i∂_y)_i (∂_x + i∂_y)_j / 4
            *gij = (xx + yy + C::i() * (xy - yx)) / 4.0;
        }
    }
    Ok(g)
}

/// `g_{ij̄}` read off an order-2 jet of `L`.
fn metric_jet2(spec: &MetricSpec, p: &Point) -> Result<M2> {
    let ctx = JetContext::new(2, *p)?;
    let l = spec.eval_l_jet(&ctx)?;
    let d = |i: usize, j: usize| -> Result<C> {
        let x: WJet = l.diff(Var::Eta(i))?.diff(Var::EtaBar(j))?;
        Ok(x.value())
    };
    Ok([[d(0, 0)?, d(0, 1)?], [d(1, 0)?, d(1, 1)?]])
}

/// Wirtinger derivative `∂/∂w` of `g` along the complex coordinate whose real part has
/// index `re`.
fn wirtinger(g: &dyn Fn(&Point) -> Result<M2>, p: &Point, re: usize, h: f64) -> Result<M2> {
    let d = |k: usize| -> Result<M2> {
        let (gp, gm) = (g(&shifted(p, &[(k, h)]))?, g(&shifted(p, &[(k, -h)]))?);
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|j| (gp[i][j] - gm[i][j]) / (2.0 * h))
        }))
    };
    let (dx, dy) = (d(re)?, d(re + 1)?);
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| (dx[i][j] - C::i() * dy[i][j]) / 2.0)
    }))
}

fn inverse(g: &M2) -> M2 {
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    [
        [g[1][1] / det, -g[0][1] / det],
        [-g[1][0] / det, g[0][0] / det],
    ]
}

/// Jet values of `g`, `N`, `L` against central differences with step `step`.
///
/// `step` applies to the first differences of `g`; `η` steps are scaled by `|η|`, the
/// natural length of a homogeneous fiber.
pub fn fd_check(spec: &MetricSpec, point: &Point, order: usize, step: f64) -> Result<FdReport> {
    let geo = Geometry::new(spec, point, order)?;
    let h_eta = step * point.eta_norm();
    let g_fd = metric_fd(spec, point, SECOND_DIFF_STEP * point.eta_norm())?;

    let g2 = |q: &Point| metric_jet2(spec, q);
    let g0 = g2(point)?;
    // dz[k] = ∂_k g, de[m] = ∂̇_m g, both indexed [j][l] for g_{jl̄}
    let dz = [
        wirtinger(&g2, point, 0, step)?,
        wirtinger(&g2, point, 2, step)?,
    ];
    let de = [
        wirtinger(&g2, point, 4, h_eta)?,
        wirtinger(&g2, point, 6, h_eta)?,
    ];
    let gi = inverse(&g0);
    let eta = point.eta;
    let mut n = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            for m in 0..2 {
                for l in 0..2 {
                    n[i][k] += gi[m][i] * dz[k][l][m] * eta[l];
                }
            }
        }
    }
    let mut lh = [[[C::new(0.0, 0.0); 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let mut delta = dz[k][j][l];
                    for m in 0..2 {
                        delta -= n[m][k] * de[m][j][l];
                    }
                    lh[i][j][k] += gi[l][i] * delta;
                }
            }
        }
    }

    let flat2 = |m: &[[WJet; 2]; 2]| -> Vec<C> { m.iter().flatten().map(WJet::value).collect() };
    let comparisons = vec![
        compare("g", &flat2(&geo.g), &g_fd.concat()),
        compare("N", &flat2(&geo.n), &n.concat()),
        compare(
            "L",
            &geo.lh
                .iter()
                .flatten()
                .flatten()
                .map(WJet::value)
                .collect::<Vec<_>>(),
            &lh.iter().flatten().flatten().copied().collect::<Vec<_>>(),
        ),
    ];
    Ok(FdReport {
        point: *point,
        step,
        comparisons,
    })
}

/// Largest relative change of base-point values between jets of order `lo` and `hi`,
/// over `g`, `N`, `L`, `C`, the frame scalars and `I`, `K`, `W`.
pub fn truncation_check(
    spec: &MetricSpec,
    point: &Point,
    lo: usize,
    hi: usize,
) -> Result<Vec<FdComparison>> {
    let a = crate::identities::PointData::new(spec, point, lo)?;
    let b = crate::identities::PointData::new(spec, point, hi)?;
    let vals = |pd: &crate::identities::PointData| -> Vec<(&'static str, Vec<C>)> {
        let geo = &pd.geo;
        let t3 = |t: &crate::geometry::T3| {
            t.iter()
                .flatten()
                .flatten()
                .map(WJet::value)
                .collect::<Vec<_>>()
        };
        let mut scalars = vec![pd.fr.a.value(), pd.fr.b.value()];
        scalars.extend(pd.fr.hs.as_array().map(WJet::value));
        vec![
            ("g", geo.g.iter().flatten().map(WJet::value).collect()),
            ("N", geo.n.iter().flatten().map(WJet::value).collect()),
            ("L", t3(&geo.lh)),
            ("C", t3(&geo.cv)),
            ("frame scalars", scalars),
            (
                "I K W",
                vec![pd.inv.i.value(), pd.inv.k.value(), pd.inv.w.value()],
            ),
        ]
    };
    Ok(vals(&a)
        .into_iter()
        .zip(vals(&b))
        .map(|((name, x), (_, y))| compare(name, &y, &x))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hartogs_point() -> Point {
        Point::from_parts((0.5, 0.1), (0.1, -0.05), (1.0, 0.2), (0.4, -0.3))
    }

    #[test]
    fn euclidean_agrees_to_rounding() {
        let m = MetricSpec::builtin("euclidean", &[]).unwrap();
        let r = fd_check(&m, &hartogs_point(), 4, DEFAULT_STEP).unwrap();
        assert!(r.max_rel_deviation() < 1e-9, "{r:?}");
    }

    #[test]
    fn hartogs_kropina_within_bound() {
        let m = MetricSpec::builtin("hartogs-kropina", &[]).unwrap();
        let r = fd_check(&m, &hartogs_point(), 4, DEFAULT_STEP).unwrap();
        assert!(r.max_rel_deviation() < 1e-5, "{r:?}");
    }

    #[test]
    fn shifted_moves_right_coordinate() {
        let p = shifted(&hartogs_point(), &[(3, 1.0), (6, -1.0)]);
        assert_eq!(p.z[1].im, 0.95);
        assert_eq!(p.eta[1].re, -0.6);
    }

    #[test]
    fn truncation_is_stable() {
        let m = MetricSpec::builtin("antonelli-shimada", &[]).unwrap();
        for c in truncation_check(&m, &hartogs_point(), 6, 8).unwrap() {
            assert!(c.max_rel_deviation < 1e-10, "{c:?}");
        }
    }
}
