//! Fundamental tensor, Chern-Finsler connection, adapted derivatives, spray and the
//! Berwald/Rund connections, all carried as jets at one point.
//!
//! Index conventions: `g[i][j] = g_{ij̄}`, `g_inv[j][i] = g^{j̄i}`, `n[i][k] = N^i_k`,
//! `lh[i][j][k] = L^i_{jk}`, `cv[i][j][k] = C^i_{jk}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::{JetContext, JetError, Var, WJet};
use crate::metric::MetricSpec;
use crate::point::Point;

pub type Vec2 = [WJet; 2];
pub type Mat2 = [[WJet; 2]; 2];
pub type T3 = [[[WJet; 2]; 2]; 2];

pub(crate) fn mat<F: FnMut(usize, usize) -> WJet>(mut f: F) -> Mat2 {
    [[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]]
}

pub(crate) fn try_mat<F>(mut f: F) -> std::result::Result<Mat2, JetError>
where
    F: FnMut(usize, usize) -> std::result::Result<WJet, JetError>,
{
    Ok([[f(0, 0)?, f(0, 1)?], [f(1, 0)?, f(1, 1)?]])
}

pub(crate) fn t3<F: FnMut(usize, usize, usize) -> WJet>(mut f: F) -> T3 {
    [0, 1].map(|i| [0, 1].map(|j| [0, 1].map(|k| f(i, j, k))))
}

pub(crate) fn try_t3<F>(mut f: F) -> std::result::Result<T3, JetError>
where
    F: FnMut(usize, usize, usize) -> std::result::Result<WJet, JetError>,
{
    let mut out: Vec<WJet> = Vec::with_capacity(8);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out.push(f(i, j, k)?);
            }
        }
    }
    Ok(t3(|i, j, k| out[i * 4 + j * 2 + k].clone()))
}

/// Sum of jets; all inputs share an order or are truncated to the lowest one.
pub(crate) fn sum<I: IntoIterator<Item = WJet>>(it: I) -> WJet {
    let mut it = it.into_iter();
    let first = it.next().expect("empty sum");
    it.fold(first, |acc, x| acc + x)
}

/// Everything derived from `L` up to the Chern-Finsler connection.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub ctx: JetContext,
    pub lag: WJet,
    pub fin: WJet,
    pub inv_fin: WJet,
    pub eta: Vec2,
    pub eta_bar: Vec2,
    pub g: Mat2,
    pub g_inv: Mat2,
    pub det: WJet,
    /// `dg_eta[k][i][j] = ∂̇_k g_{ij̄}`.
    pub dg_eta: T3,
    pub n: Mat2,
    pub n_bar: Mat2,
    pub lh: T3,
    pub lh_bar: T3,
    pub cv: T3,
    pub cv_bar: T3,
}

impl Geometry {
    /// Evaluates `spec` at `point` with jets of the given order.
    pub fn new(spec: &MetricSpec, point: &Point, order: usize) -> Result<Geometry> {
        let ctx = JetContext::new(order, *point)?;
        let lag = spec.eval_l_jet(&ctx)?;
        Geometry::from_lagrangian(ctx, lag)
    }

    /// Builds the connection from a precomputed `L` jet.
    pub fn from_lagrangian(ctx: JetContext, lag: WJet) -> Result<Geometry> {
        if ctx.order < 3 {
            return Err(Error::Jet(JetError::OrderBudget {
                quantity: "Chern-Finsler connection".into(),
                needed: 3,
                available: ctx.order,
            }));
        }
        let seeds = ctx.seeds();
        let eta = [seeds[2].clone(), seeds[3].clone()];
        let eta_bar = [seeds[6].clone(), seeds[7].clone()];
        let fin = lag.sqrt()?;
        let inv_fin = fin.recip()?;
        let d_eta = [lag.diff(Var::Eta(0))?, lag.diff(Var::Eta(1))?];
        let g = try_mat(|i, j| d_eta[i].diff(Var::EtaBar(j)))?;
        let det = &g[0][0] * &g[1][1] - &g[0][1] * &g[1][0];
        check_definite(&g, &det)?;
        let inv_det = det.recip()?;
        let g_inv = [
            [&g[1][1] * &inv_det, -(&g[0][1] * &inv_det)],
            [-(&g[1][0] * &inv_det), &g[0][0] * &inv_det],
        ];
        let named = |e: JetError| Error::Jet(e.named("Chern-Finsler connection"));
        let dg_z: T3 = try_t3(|k, i, j| g[i][j].diff(Var::Z(k))).map_err(named)?;
        let dg_eta: T3 = try_t3(|k, i, j| g[i][j].diff(Var::Eta(k))).map_err(named)?;
        // h[k][m] = (∂_k g_{lm̄}) η^l
        let h = mat(|k, m| &dg_z[k][0][m] * &eta[0] + &dg_z[k][1][m] * &eta[1]);
        let n = mat(|i, k| &g_inv[0][i] * &h[k][0] + &g_inv[1][i] * &h[k][1]);
        // δ_k g_{jl̄}
        let dlt = t3(|k, j, l| {
            &dg_z[k][j][l] - &(&n[0][k] * &dg_eta[0][j][l] + &n[1][k] * &dg_eta[1][j][l])
        });
        let lh = t3(|i, j, k| &g_inv[0][i] * &dlt[k][j][0] + &g_inv[1][i] * &dlt[k][j][1]);
        let cv = t3(|i, j, k| &g_inv[0][i] * &dg_eta[k][j][0] + &g_inv[1][i] * &dg_eta[k][j][1]);
        let n_bar = mat(|i, k| n[i][k].conj());
        let lh_bar = t3(|i, j, k| lh[i][j][k].conj());
        let cv_bar = t3(|i, j, k| cv[i][j][k].conj());
        Ok(Geometry {
            ctx,
            lag,
            fin,
            inv_fin,
            eta,
            eta_bar,
            g,
            g_inv,
            det,
            dg_eta,
            n,
            n_bar,
            lh,
            lh_bar,
            cv,
            cv_bar,
        })
    }

    /// Geometry of the pulled-back metric `L'(z', η') = L(M⁻¹z', M⁻¹η')` at `(Mz, Mη)`.
    pub fn linear_pullback(
        spec: &MetricSpec,
        point: &Point,
        m: [[Complex64; 2]; 2],
        order: usize,
    ) -> Result<Geometry> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.norm() < 1e-14 {
            return Err(Error::Degenerate("linear change is singular".into()));
        }
        let minv = [
            [m[1][1] / det, -m[0][1] / det],
            [-m[1][0] / det, m[0][0] / det],
        ];
        let apply = |a: [[Complex64; 2]; 2], v: [Complex64; 2]| {
            [
                a[0][0] * v[0] + a[0][1] * v[1],
                a[1][0] * v[0] + a[1][1] * v[1],
            ]
        };
        let mapped = Point::new(apply(m, point.z), apply(m, point.eta));
        let ctx = JetContext::new(order, mapped)?;
        let original = Point::new(apply(minv, mapped.z), apply(minv, mapped.eta));
        spec.check_domain(&original)?;
        let s = ctx.seeds();
        let combo =
            |a: usize, b: usize, row: usize| s[a].scale(minv[row][0]) + s[b].scale(minv[row][1]);
        let vars = [
            combo(0, 1, 0),
            combo(0, 1, 1),
            combo(2, 3, 0),
            combo(2, 3, 1),
        ];
        let lag = spec.eval_with(&vars)?;
        Geometry::from_lagrangian(ctx, lag)
    }

    pub fn order(&self) -> usize {
        self.ctx.order
    }

    pub fn point(&self) -> &Point {
        &self.ctx.point
    }

    /// `δ_k x = ∂x/∂z^k − N^j_k ∂x/∂η^j`.
    pub fn delta(&self, x: &WJet, k: usize) -> std::result::Result<WJet, JetError> {
        Ok(x.diff(Var::Z(k))?
            - (&self.n[0][k] * &x.diff(Var::Eta(0))? + &self.n[1][k] * &x.diff(Var::Eta(1))?))
    }

    /// `δ_k̄ x = ∂x/∂z̄^k − N̄^j_k ∂x/∂η̄^j`.
    pub fn delta_bar(&self, x: &WJet, k: usize) -> std::result::Result<WJet, JetError> {
        Ok(x.diff(Var::ZBar(k))?
            - (&self.n_bar[0][k] * &x.diff(Var::EtaBar(0))?
                + &self.n_bar[1][k] * &x.diff(Var::EtaBar(1))?))
    }

    /// `∂̇_k x`.
    pub fn vdot(&self, x: &WJet, k: usize) -> std::result::Result<WJet, JetError> {
        x.diff(Var::Eta(k))
    }

    /// `∂̇_k̄ x`.
    pub fn vdot_bar(&self, x: &WJet, k: usize) -> std::result::Result<WJet, JetError> {
        x.diff(Var::EtaBar(k))
    }

    /// Contraction `x_i η^i`.
    pub fn contract_eta(&self, x: &[WJet; 2]) -> WJet {
        &x[0] * &self.eta[0] + &x[1] * &self.eta[1]
    }

    pub fn contract_eta_bar(&self, x: &[WJet; 2]) -> WJet {
        &x[0] * &self.eta_bar[0] + &x[1] * &self.eta_bar[1]
    }

    /// Torsion `T^i_{jk} = L^i_{jk} − L^i_{kj}` with its two contractions.
    pub fn torsion(&self) -> Torsion {
        let t = t3(|i, j, k| &self.lh[i][j][k] - &self.lh[i][k][j]);
        let t_eta = mat(|i, k| &t[i][0][k] * &self.eta[0] + &t[i][1][k] * &self.eta[1]);
        let form = [0, 1].map(|k| {
            sum((0..2).flat_map(|i| {
                let t_eta = &t_eta;
                (0..2).map(move |l| &(&self.g[i][l] * &t_eta[i][k]) * &self.eta_bar[l])
            }))
        });
        Torsion { t, t_eta, form }
    }

    pub fn spray(&self) -> std::result::Result<Spray, JetError> {
        let g = [0, 1]
            .map(|i| (&self.n[i][0] * &self.eta[0] + &self.n[i][1] * &self.eta[1]).scale_re(0.5));
        let nc = try_mat(|i, j| g[i].diff(Var::Eta(j)))?;
        let dg_bar = try_mat(|i, k| g[i].diff(Var::EtaBar(k)))?;
        Ok(Spray { g, nc, dg_bar })
    }

    /// Berwald and Rund connections built on the canonical nonlinear connection.
    pub fn berwald_rund(&self, spray: &Spray) -> std::result::Result<BerwaldRund, JetError> {
        let nc = &spray.nc;
        let nc_bar = mat(|i, j| nc[i][j].conj());
        let bl = try_t3(|i, j, k| nc[i][j].diff(Var::Eta(k)))?;
        let bl_bar = try_t3(|i, j, k| nc[i][j].diff(Var::EtaBar(k)))?;
        let dc = |x: &WJet, k: usize| -> std::result::Result<WJet, JetError> {
            Ok(x.diff(Var::Z(k))?
                - (&nc[0][k] * &x.diff(Var::Eta(0))? + &nc[1][k] * &x.diff(Var::Eta(1))?))
        };
        let dc_bar = |x: &WJet, k: usize| -> std::result::Result<WJet, JetError> {
            Ok(x.diff(Var::ZBar(k))?
                - (&nc_bar[0][k] * &x.diff(Var::EtaBar(0))?
                    + &nc_bar[1][k] * &x.diff(Var::EtaBar(1))?))
        };
        // dcg[k][j][l] = δ^c_k g_{jl̄}, dcg_bar[k][j][l] = δ^c_k̄ g_{jl̄}
        let dcg = try_t3(|k, j, l| dc(&self.g[j][l], k))?;
        let dcg_bar = try_t3(|k, j, l| dc_bar(&self.g[j][l], k))?;
        let gi = &self.g_inv;
        let rl = t3(|i, j, k| {
            sum((0..2).map(|l| &gi[l][i] * &(&dcg[k][j][l] + &dcg[j][k][l]))).scale_re(0.5)
        });
        let rl_bar = t3(|i, j, k| {
            sum((0..2).map(|l| &gi[l][i] * &(&dcg_bar[k][j][l] - &dcg_bar[l][j][k]))).scale_re(0.5)
        });
        Ok(BerwaldRund {
            bl,
            bl_bar,
            rl,
            rl_bar,
        })
    }
}

fn check_definite(g: &Mat2, det: &WJet) -> Result<()> {
    let g00 = g[0][0].value();
    let g11 = g[1][1].value();
    let d = det.value();
    let trace = g00.norm() + g11.norm();
    let herm = (g[0][1].value() - g[1][0].value().conj()).norm();
    if herm > 1e-8 * trace.max(1e-300) {
        return Err(Error::Degenerate(format!(
            "g is not Hermitian (defect {herm:.3e})"
        )));
    }
    if d.norm() < 1e-12 * trace * trace {
        return Err(Error::Degenerate(format!(
            "det g = {d} is negligible against trace {trace}"
        )));
    }
    if !(g00.re > 0.0 && d.re > 0.0) {
        return Err(Error::Indefinite(format!(
            "g_11 = {}, det g = {}",
            g00.re, d.re
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Torsion {
    pub t: T3,
    /// `T^i_{jk} η^j`, indexed `[i][k]`.
    pub t_eta: Mat2,
    /// `g_{il̄} T^i_{jk} η^j η̄^l`, indexed `[k]`.
    pub form: Vec2,
}

#[derive(Clone, Debug)]
pub struct Spray {
    /// `G^i = ½ N^i_j η^j`.
    pub g: Vec2,
    /// Canonical nonlinear connection `nc[i][j] = ∂̇_j G^i`.
    pub nc: Mat2,
    /// `dg_bar[i][k] = ∂̇_k̄ G^i`.
    pub dg_bar: Mat2,
}

#[derive(Clone, Debug)]
pub struct BerwaldRund {
    /// `bl[i][j][k] = ∂̇_k Nc^i_j`.
    pub bl: T3,
    /// `bl_bar[i][j][k] = ∂̇_k̄ Nc^i_j`.
    pub bl_bar: T3,
    /// `rl[i][j][k] = ½ g^{l̄i}(δ^c_k g_{jl̄} + δ^c_j g_{kl̄})`.
    pub rl: T3,
    /// Mixed Rund coefficient `½ g^{l̄i}(δ^c_k̄ g_{jl̄} − δ^c_l̄ g_{jk̄})`.
    pub rl_bar: T3,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn euclidean_is_flat() {
        let m = MetricSpec::builtin("euclidean", &[]).unwrap();
        let p = Point::new([c(0.3, 0.1), c(-0.2, 0.4)], [c(1.0, 0.5), c(-0.3, 0.7)]);
        let geo = Geometry::new(&m, &p, 4).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((geo.g[i][j].value() - c(want, 0.0)).norm() < 1e-14);
                assert!(geo.n[i][j].max_abs() < 1e-14);
                for k in 0..2 {
                    assert!(geo.lh[i][j][k].max_abs() < 1e-14);
                    assert!(geo.cv[i][j][k].max_abs() < 1e-14);
                }
            }
        }
        assert!((geo.det.value() - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn antonelli_shimada_metric_entry() {
        let m = MetricSpec::builtin("antonelli-shimada", &[("sigma".into(), "0".into())]).unwrap();
        let p = Point::new([c(0.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(1.0, 0.0)]);
        let geo = Geometry::new(&m, &p, 4).unwrap();
        let want = 3.0 / (2.0 * 2f64.sqrt());
        assert!((geo.g[0][0].value() - c(want, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn hartogs_hermitian_inverse_entry() {
        let m = MetricSpec::builtin("hartogs-hermitian", &[]).unwrap();
        let p = Point::new([c(0.5, 0.0), c(0.1, 0.0)], [c(1.0, 0.0), c(0.3, 0.0)]);
        let geo = Geometry::new(&m, &p, 4).unwrap();
        assert!((geo.g_inv[0][0].value() - c(0.5625, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn budget_error_names_connection() {
        let m = MetricSpec::builtin("euclidean", &[]).unwrap();
        let p = Point::new([c(0.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]);
        match Geometry::new(&m, &p, 2) {
            Err(Error::Jet(JetError::OrderBudget { quantity, .. })) => {
                assert!(quantity.contains("Chern-Finsler"))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn indefinite_metric_rejected() {
        let m = MetricSpec::from_dsl("indef", "L = abs2(e1) - 0.5*abs2(e2) + 10").unwrap();
        let p = Point::new([c(0.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            Geometry::new(&m, &p, 4),
            Err(Error::Indefinite(_))
        ));
    }
}
