//! Local complex Berwald frame `{l, m, l̄, m̄}`, its horizontal lift `{λ, μ}`, and the
//! vertical (`A`, `B`) and horizontal (`J … H`) frame scalars.

use crate::geometry::{sum, Geometry, Vec2, T3};
use crate::jet::{JetError, WJet};

/// The eight horizontal scalars, in the order `J U V X O Y E H`.
#[derive(Clone, Debug)]
pub struct HScalars {
    pub j: WJet,
    pub u: WJet,
    pub v: WJet,
    pub x: WJet,
    pub o: WJet,
    pub y: WJet,
    pub e: WJet,
    pub h: WJet,
}

pub const HSCALAR_NAMES: [&str; 8] = ["J", "U", "V", "X", "O", "Y", "E", "H"];

impl HScalars {
    pub fn as_array(&self) -> [&WJet; 8] {
        [
            &self.j, &self.u, &self.v, &self.x, &self.o, &self.y, &self.e, &self.h,
        ]
    }

    pub fn conj(&self) -> HScalars {
        HScalars {
            j: self.j.conj(),
            u: self.u.conj(),
            v: self.v.conj(),
            x: self.x.conj(),
            o: self.o.conj(),
            y: self.y.conj(),
            e: self.e.conj(),
            h: self.h.conj(),
        }
    }

    /// `J + Y`
    pub fn jy(&self) -> WJet {
        &self.j + &self.y
    }

    /// `V + H`
    pub fn vh(&self) -> WJet {
        &self.v + &self.h
    }
}

#[derive(Clone, Debug)]
pub struct Frame {
    pub l_up: Vec2,
    pub l_dn: Vec2,
    pub m_up: Vec2,
    pub m_dn: Vec2,
    /// Conjugates: `l^ī`, `l_ī`, `m^ī`, `m_ī`.
    pub l_up_bar: Vec2,
    pub l_dn_bar: Vec2,
    pub m_up_bar: Vec2,
    pub m_dn_bar: Vec2,
    pub sqrt_g: WJet,
    pub a: WJet,
    pub b: WJet,
    pub a_bar: WJet,
    pub b_bar: WJet,
    pub hs: HScalars,
    pub hs_bar: HScalars,
}

/// `Σ c_i a^j b^k T^i_{jk}`
pub(crate) fn frame_contract(a: &Vec2, b: &Vec2, c: &Vec2, t: &T3) -> WJet {
    sum((0..8).map(|n| {
        let (i, j, k) = (n >> 2, (n >> 1) & 1, n & 1);
        &(&(&c[i] * &a[j]) * &b[k]) * &t[i][j][k]
    }))
}

fn conj2(v: &Vec2) -> Vec2 {
    [v[0].conj(), v[1].conj()]
}

impl Frame {
    pub fn new(geo: &Geometry) -> Result<Frame, JetError> {
        let named = |e: JetError| e.named("Berwald frame");
        let f_inv = &geo.inv_fin;
        let l_up = [&geo.eta[0] * f_inv, &geo.eta[1] * f_inv];
        let l_dn = [0, 1].map(|i| &geo.contract_eta_bar(&geo.g[i]) * f_inv);
        let sqrt_g = geo.det.sqrt().map_err(named)?;
        let inv_sqrt_g = sqrt_g.recip().map_err(named)?;
        let m_up = [-(&l_dn[1] * &inv_sqrt_g), &l_dn[0] * &inv_sqrt_g];
        let m_dn = [-(&sqrt_g * &l_up[1]), &sqrt_g * &l_up[0]];
        let a = frame_contract(&m_up, &m_up, &l_dn, &geo.cv);
        let b = frame_contract(&m_up, &m_up, &m_dn, &geo.cv);
        let lh = &geo.lh;
        let hs = HScalars {
            j: frame_contract(&l_up, &l_up, &l_dn, lh),
            u: frame_contract(&m_up, &l_up, &l_dn, lh),
            v: frame_contract(&l_up, &m_up, &l_dn, lh),
            x: frame_contract(&m_up, &m_up, &l_dn, lh),
            o: frame_contract(&l_up, &l_up, &m_dn, lh),
            y: frame_contract(&m_up, &l_up, &m_dn, lh),
            e: frame_contract(&l_up, &m_up, &m_dn, lh),
            h: frame_contract(&m_up, &m_up, &m_dn, lh),
        };
        Ok(Frame {
            l_up_bar: conj2(&l_up),
            l_dn_bar: conj2(&l_dn),
            m_up_bar: conj2(&m_up),
            m_dn_bar: conj2(&m_dn),
            l_up,
            l_dn,
            m_up,
            m_dn,
            sqrt_g,
            a_bar: a.conj(),
            b_bar: b.conj(),
            a,
            b,
            hs_bar: hs.conj(),
            hs,
        })
    }

    /// `l(x) = l^i ∂̇_i x`
    pub fn l(&self, geo: &Geometry, x: &WJet) -> Result<WJet, JetError> {
        Ok(&self.l_up[0] * &geo.vdot(x, 0)? + &self.l_up[1] * &geo.vdot(x, 1)?)
    }

    /// `m(x) = m^i ∂̇_i x`
    pub fn m(&self, geo: &Geometry, x: &WJet) -> Result<WJet, JetError> {
        Ok(&self.m_up[0] * &geo.vdot(x, 0)? + &self.m_up[1] * &geo.vdot(x, 1)?)
    }

    /// `l̄(x) = l^ī ∂̇_ī x`
    pub fn l_bar(&self, geo: &Geometry, x: &WJet) -> Result<WJet, JetError> {
        Ok(&self.l_up_bar[0] * &geo.vdot_bar(x, 0)? + &self.l_up_bar[1] * &geo.vdot_bar(x, 1)?)
    }

    /// `m̄(x) = m^ī ∂̇_ī x`
    pub fn m_bar(&self, geo: &Geometry, x: &WJet) -> Result<WJet, JetError> {
        Ok(&self.m_up_bar[0] * &geo.vdot_bar(x, 0)? + &self.m_up_bar[1] * &geo.vdot_bar(x, 1)?)
    }

    /// `λ(x) = l^i δ_i x`
    pub fn lambda(&self, geo: &Geometry, x: &WJet) -> Result<WJet, JetError> {
        Ok(&self.l_up[0] * &geo.delta(x, 0)? + &self.l_up[1] * &geo.delta(x, 1)?)
    }

    /// `μ(x) = m^i δ_i x`
    pub fn mu(&self, geo: &Geometry, x: &WJet) -> Result<WJet, JetError> {
        Ok(&self.m_up[0] * &geo.delta(x, 0)? + &self.m_up[1] * &geo.delta(x, 1)?)
    }

    /// `λ̄(x) = l^ī δ_ī x`
    pub fn lambda_bar(&self, geo: &Geometry, x: &WJet) -> Result<WJet, JetError> {
        Ok(&self.l_up_bar[0] * &geo.delta_bar(x, 0)? + &self.l_up_bar[1] * &geo.delta_bar(x, 1)?)
    }

    /// `μ̄(x) = m^ī δ_ī x`
    pub fn mu_bar(&self, geo: &Geometry, x: &WJet) -> Result<WJet, JetError> {
        Ok(&self.m_up_bar[0] * &geo.delta_bar(x, 0)? + &self.m_up_bar[1] * &geo.delta_bar(x, 1)?)
    }

    /// Componentwise application of a frame operator to a 2-vector of jets.
    pub fn apply2<F>(&self, v: &Vec2, mut op: F) -> Result<Vec2, JetError>
    where
        F: FnMut(&WJet) -> Result<WJet, JetError>,
    {
        Ok([op(&v[0])?, op(&v[1])?])
    }

    /// Reconstruction `A l^i m_k m_j + B m^i m_k m_j` of `C^i_{jk}`.
    pub fn c_from_scalars(&self) -> T3 {
        crate::geometry::t3(|i, j, k| {
            let mm = &self.m_dn[k] * &self.m_dn[j];
            &(&(&self.a * &self.l_up[i]) + &(&self.b * &self.m_up[i])) * &mm
        })
    }

    /// Reconstruction of `L^i_{jk}` from the eight horizontal scalars.
    pub fn l_from_scalars(&self) -> T3 {
        let (l, m) = (&self.l_up, &self.m_up);
        let (ld, md) = (&self.l_dn, &self.m_dn);
        let s = &self.hs;
        crate::geometry::t3(|i, j, k| {
            let up_l = sum([
                &(&s.j * &ld[j]) * &ld[k],
                &(&s.u * &md[j]) * &ld[k],
                &(&s.v * &ld[j]) * &md[k],
                &(&s.x * &md[j]) * &md[k],
            ]);
            let up_m = sum([
                &(&s.o * &ld[j]) * &ld[k],
                &(&s.y * &md[j]) * &ld[k],
                &(&s.e * &ld[j]) * &md[k],
                &(&s.h * &md[j]) * &md[k],
            ]);
            &(&l[i] * &up_l) + &(&m[i] * &up_m)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricSpec;
    use crate::point::Point;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn euclidean_frame_components() {
        let m = MetricSpec::builtin("euclidean", &[]).unwrap();
        let p = Point::from_parts((0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (1.0, 0.0));
        let geo = Geometry::new(&m, &p, 4).unwrap();
        let f = Frame::new(&geo).unwrap();
        let s = 0.5f64.sqrt();
        assert!((f.m_up[0].value() - c(-s, 0.0)).norm() < 1e-15);
        assert!((f.m_up[1].value() - c(s, 0.0)).norm() < 1e-15);
        for x in f.hs.as_array() {
            assert!(x.max_abs() < 1e-15);
        }
        assert!(f.a.max_abs() < 1e-15 && f.b.max_abs() < 1e-15);
    }

    #[test]
    fn antonelli_shimada_vertical_scalars() {
        let m = MetricSpec::builtin("antonelli-shimada", &[("sigma".into(), "0".into())]).unwrap();
        let p = Point::from_parts((0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (1.0, 0.0));
        let geo = Geometry::new(&m, &p, 4).unwrap();
        let f = Frame::new(&geo).unwrap();
        assert!((f.a.value() - c(2f64.powf(-1.25), 0.0)).norm() < 1e-14);
        assert!(f.b.value().norm() < 1e-14);
    }

    #[test]
    fn horizontal_lift_kills_lagrangian() {
        let m = MetricSpec::builtin("hartogs-kropina", &[]).unwrap();
        let p = Point::from_parts((0.5, 0.1), (0.1, -0.05), (1.0, 0.2), (0.4, -0.3));
        let geo = Geometry::new(&m, &p, 4).unwrap();
        let f = Frame::new(&geo).unwrap();
        let lam = f.lambda(&geo, &geo.lag).unwrap().value();
        let mu = f.mu(&geo, &geo.lag).unwrap().value();
        let scale = geo.lag.value().norm();
        assert!(lam.norm() < 1e-10 * scale && mu.norm() < 1e-10 * scale);
    }
}
