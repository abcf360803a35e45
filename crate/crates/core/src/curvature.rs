//! Curvature blocks `R`, `P`, `Ξ`, `S` of the Chern-Finsler connection, the invariants
//! `I`, `K`, `W`, the distinguished holomorphic sectional curvatures and the fit of the
//! constant-curvature special form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::frame::Frame;
use crate::geometry::{sum, Geometry, Vec2};
use crate::jet::{JetError, WJet};
use crate::tensor::{JetTensor, Slot};

pub const UP_SLOTS: [Slot; 4] = [Slot::Up, Slot::Down, Slot::DownBar, Slot::Down];
pub const LOW_SLOTS: [Slot; 4] = [Slot::DownBar, Slot::Down, Slot::DownBar, Slot::Down];

/// Upper blocks are indexed `(i, j, h, k)` for `X^i_{jh̄k}`; lowered ones `(r, j, h, k)`
/// for `X_{r̄jh̄k} = g_{ir̄} X^i_{jh̄k}`.
#[derive(Clone, Debug)]
pub struct Curvature {
    pub r_up: JetTensor,
    pub p_up: JetTensor,
    pub xi_up: JetTensor,
    pub s_up: JetTensor,
    pub r: JetTensor,
    pub p: JetTensor,
    pub xi: JetTensor,
    pub s: JetTensor,
}

fn lower(geo: &Geometry, up: &JetTensor) -> JetTensor {
    JetTensor::from_fn(&LOW_SLOTS, |x| {
        let (r, j, h, k) = (x[0], x[1], x[2], x[3]);
        &(&geo.g[0][r] * up.get(&[0, j, h, k])) + &(&geo.g[1][r] * up.get(&[1, j, h, k]))
    })
}

impl Curvature {
    pub fn new(geo: &Geometry) -> Result<Curvature, JetError> {
        let named = |e: JetError| e.named("curvature tensors");
        let mut dn = Vec::with_capacity(8);
        let mut vn = Vec::with_capacity(8);
        for h in 0..2 {
            for l in 0..2 {
                for k in 0..2 {
                    dn.push(geo.delta_bar(&geo.n[l][k], h).map_err(named)?);
                    vn.push(geo.vdot_bar(&geo.n[l][k], h).map_err(named)?);
                }
            }
        }
        let at = |v: &Vec<WJet>, h: usize, l: usize, k: usize| v[h * 4 + l * 2 + k].clone();
        let r_up = JetTensor::try_from_fn(&UP_SLOTS, |x| {
            let (i, j, h, k) = (x[0], x[1], x[2], x[3]);
            let d = geo.delta_bar(&geo.lh[i][j][k], h)?;
            Ok(-(d + sum((0..2).map(|l| &at(&dn, h, l, k) * &geo.cv[i][j][l]))))
        })
        .map_err(named)?;
        let p_up = JetTensor::try_from_fn(&UP_SLOTS, |x| {
            let (i, j, h, k) = (x[0], x[1], x[2], x[3]);
            let d = geo.vdot_bar(&geo.lh[i][j][k], h)?;
            Ok(-(d + sum((0..2).map(|l| &at(&vn, h, l, k) * &geo.cv[i][j][l]))))
        })
        .map_err(named)?;
        let xi_up = JetTensor::try_from_fn(&UP_SLOTS, |x| {
            Ok(-geo.delta_bar(&geo.cv[x[0]][x[1]][x[3]], x[2])?)
        })
        .map_err(named)?;
        let s_up = JetTensor::try_from_fn(&UP_SLOTS, |x| {
            Ok(-geo.vdot_bar(&geo.cv[x[0]][x[1]][x[3]], x[2])?)
        })
        .map_err(named)?;
        Ok(Curvature {
            r: lower(geo, &r_up),
            p: lower(geo, &p_up),
            xi: lower(geo, &xi_up),
            s: lower(geo, &s_up),
            r_up,
            p_up,
            xi_up,
            s_up,
        })
    }
}

/// `X(a, b̄, c, d̄) = a^j b^r̄ c^k d^h̄ X_{r̄jh̄k}` with `b`, `d` given by their unbarred
/// components (they are conjugated here).
pub fn four_contract(x: &JetTensor, a: &Vec2, b: &Vec2, c: &Vec2, d: &Vec2) -> WJet {
    let bb = [b[0].conj(), b[1].conj()];
    let dd = [d[0].conj(), d[1].conj()];
    sum((0..16).map(|n| {
        let (r, j, h, k) = (n >> 3, (n >> 2) & 1, (n >> 1) & 1, n & 1);
        &(&(&(&bb[r] * &a[j]) * &dd[h]) * &c[k]) * x.get(&[r, j, h, k])
    }))
}

#[derive(Clone, Debug)]
pub struct Invariants {
    pub i: WJet,
    pub k: WJet,
    pub w: WJet,
}

impl Invariants {
    pub fn new(geo: &Geometry, fr: &Frame) -> Result<Invariants, JetError> {
        let b_mbar = fr.m_bar(geo, &fr.b).map_err(|e| e.named("invariant I"))?;
        let i = -(b_mbar + (&fr.b * &fr.b_bar).scale_re(0.5));
        let k = -fr
            .lambda_bar(geo, &fr.hs.j)
            .map_err(|e| e.named("invariant K"))?;
        let nw = |e: JetError| e.named("invariant W");
        let h_mubar = fr.mu_bar(geo, &fr.hs.h).map_err(nw)?;
        let e_mubar = fr.mu_bar(geo, &fr.hs.e).map_err(nw)?;
        let vh_bar = &fr.hs_bar.v + &fr.hs_bar.h;
        let w = -(h_mubar + (&fr.hs.h * &vh_bar).scale_re(0.5) + &(&(&fr.b * &geo.fin) * &e_mubar));
        Ok(Invariants { i, k, w })
    }
}

/// A quantity computed by the tensor contraction and by the invariant formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoutePair {
    pub contraction: f64,
    pub invariant: f64,
    /// Largest imaginary part seen on either route.
    pub imag: f64,
}

impl RoutePair {
    fn new(contraction: Complex64, invariant: Complex64) -> RoutePair {
        RoutePair {
            contraction: contraction.re,
            invariant: invariant.re,
            imag: contraction.im.abs().max(invariant.im.abs()),
        }
    }

    pub fn disagreement(&self) -> f64 {
        (self.contraction - self.invariant).abs()
            / self.contraction.abs().max(self.invariant.abs()).max(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sectional {
    pub kv_l: RoutePair,
    pub kv_m: RoutePair,
    pub kh_lambda: RoutePair,
    pub kh_mu: RoutePair,
}

impl Sectional {
    pub fn new(fr: &Frame, curv: &Curvature, inv: &Invariants) -> Sectional {
        let two = |x: WJet| x.value() * 2.0;
        let (l, m) = (&fr.l_up, &fr.m_up);
        Sectional {
            kv_l: RoutePair::new(
                two(four_contract(&curv.s, l, l, l, l)),
                Complex64::new(0.0, 0.0),
            ),
            kv_m: RoutePair::new(two(four_contract(&curv.s, m, m, m, m)), inv.i.value() * 2.0),
            kh_lambda: RoutePair::new(two(four_contract(&curv.r, l, l, l, l)), inv.k.value() * 2.0),
            kh_mu: RoutePair::new(two(four_contract(&curv.r, m, m, m, m)), inv.w.value() * 2.0),
        }
    }

    pub fn max_disagreement(&self) -> f64 {
        [self.kv_l, self.kv_m, self.kh_lambda, self.kh_mu]
            .iter()
            .map(RoutePair::disagreement)
            .fold(0.0, f64::max)
    }
}

/// Least-squares fit of `R_{r̄jh̄k} ≈ 𝒦 (g_{jr̄} g_{kh̄} + g_{kr̄} g_{jh̄})`.
#[derive(Clone, Debug)]
pub struct SpecialFormFit {
    pub kfit: WJet,
    /// Max component of `R − 𝒦 T` over `max(1, max |R|)`.
    pub residual: f64,
}

impl SpecialFormFit {
    pub fn new(geo: &Geometry, curv: &Curvature) -> Result<SpecialFormFit, JetError> {
        let g = &geo.g;
        let t = JetTensor::from_fn(&LOW_SLOTS, |x| {
            let (r, j, h, k) = (x[0], x[1], x[2], x[3]);
            &(&g[j][r] * &g[k][h]) + &(&g[k][r] * &g[j][h])
        });
        let num = sum(t
            .comps
            .iter()
            .zip(&curv.r.comps)
            .map(|(a, b)| &a.conj() * b));
        let den = sum(t.comps.iter().map(|a| &a.conj() * a));
        let kfit = num.div_jet(&den).map_err(|e| e.named("special form fit"))?;
        let kv = kfit.value();
        let worst = t
            .comps
            .iter()
            .zip(&curv.r.comps)
            .map(|(a, b)| (b.value() - a.value() * kv).norm())
            .fold(0.0, f64::max);
        Ok(SpecialFormFit {
            residual: worst / curv.r.max_abs_value().max(1.0),
            kfit,
        })
    }

    /// Largest `|∂̇_k 𝒦|`, `|∂̇_k̄ 𝒦|`, or `None` when no jet order is left.
    pub fn vertical_variation(&self, geo: &Geometry) -> Option<f64> {
        let mut worst: f64 = 0.0;
        for k in 0..2 {
            worst = worst.max(geo.vdot(&self.kfit, k).ok()?.value().norm());
            worst = worst.max(geo.vdot_bar(&self.kfit, k).ok()?.value().norm());
        }
        Some(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricSpec;
    use crate::point::Point;

    #[test]
    fn antonelli_shimada_vertical_invariant() {
        let m = MetricSpec::builtin("antonelli-shimada", &[("sigma".into(), "0".into())]).unwrap();
        let p = Point::from_parts((0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (1.0, 0.0));
        let geo = Geometry::new(&m, &p, 5).unwrap();
        let fr = Frame::new(&geo).unwrap();
        let curv = Curvature::new(&geo).unwrap();
        let inv = Invariants::new(&geo, &fr).unwrap();
        assert!((inv.i.value().re - 2f64.sqrt()).abs() < 1e-12);
        let sec = Sectional::new(&fr, &curv, &inv);
        assert!((sec.kv_m.contraction - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(sec.kv_l.contraction.abs() < 1e-12);
        assert!(inv.k.value().norm() < 1e-12 && inv.w.value().norm() < 1e-12);
    }

    fn hartogs_vertical(name: &str, p: Point) -> (Sectional, f64) {
        let m = MetricSpec::builtin(name, &[]).unwrap();
        let geo = Geometry::new(&m, &p, 5).unwrap();
        let fr = Frame::new(&geo).unwrap();
        let curv = Curvature::new(&geo).unwrap();
        let inv = Invariants::new(&geo, &fr).unwrap();
        (Sectional::new(&fr, &curv, &inv), geo.lag.value().re)
    }

    #[test]
    fn hartogs_kropina_vertical_curvature() {
        let p = Point::from_parts((0.5, 0.1), (0.1, -0.05), (1.0, 0.2), (0.4, -0.3));
        let (sec, l) = hartogs_vertical("hartogs-kropina", p);
        assert!((sec.kv_m.contraction * l + 2.0).abs() < 1e-9);
        assert!(sec.max_disagreement() < 1e-9, "{sec:?}");
    }

    #[test]
    fn hartogs_randers_vertical_routes_agree() {
        // K^v_m L is not constant here: -1.663 and 1.833 at these points
        let a = Point::from_parts((0.5, 0.1), (0.1, -0.05), (1.0, 0.2), (0.4, -0.3));
        let b = Point::from_parts((0.6, 0.0), (0.2, 0.1), (0.3, 0.0), (1.0, 0.5));
        let (sa, la) = hartogs_vertical("hartogs-randers", a);
        let (sb, lb) = hartogs_vertical("hartogs-randers", b);
        assert!(sa.max_disagreement() < 1e-9 && sb.max_disagreement() < 1e-9);
        assert!((sa.kv_m.contraction * la + 1.6632913940119818).abs() < 1e-9);
        assert!((sb.kv_m.contraction * lb - 1.8334119933113928).abs() < 1e-9);
    }
}
