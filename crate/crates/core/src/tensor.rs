//! Jet-valued tensors with declared index signature and Chern-Finsler covariant
//! derivatives along the four directions.

use num_complex::Complex64;

use crate::geometry::{Geometry, T3};
use crate::jet::{JetError, WJet};

/// Kind of one tensor index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Up,
    Down,
    UpBar,
    DownBar,
}

/// Direction of a covariant derivative: `|k`, `|k̄`, `|_k` (vertical), `|_k̄`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    H,
    HBar,
    V,
    VBar,
}

impl Dir {
    fn barred(self) -> bool {
        matches!(self, Dir::HBar | Dir::VBar)
    }
}

/// Components are stored row-major, index `i_0 i_1 ... i_{r-1}` at `Σ i_s 2^{r-1-s}`.
#[derive(Clone, Debug)]
pub struct JetTensor {
    pub slots: Vec<Slot>,
    pub comps: Vec<WJet>,
}

fn flat(idx: &[usize]) -> usize {
    idx.iter().fold(0, |a, &i| a * 2 + i)
}

pub(crate) fn unflat(mut n: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for s in (0..rank).rev() {
        idx[s] = n & 1;
        n >>= 1;
    }
    idx
}

impl JetTensor {
    pub fn from_fn(slots: &[Slot], mut f: impl FnMut(&[usize]) -> WJet) -> JetTensor {
        let rank = slots.len();
        let comps = (0..1usize << rank).map(|n| f(&unflat(n, rank))).collect();
        JetTensor {
            slots: slots.to_vec(),
            comps,
        }
    }

    pub fn try_from_fn<E>(
        slots: &[Slot],
        mut f: impl FnMut(&[usize]) -> Result<WJet, E>,
    ) -> Result<JetTensor, E> {
        let rank = slots.len();
        let mut comps = Vec::with_capacity(1 << rank);
        for n in 0..1usize << rank {
            comps.push(f(&unflat(n, rank))?);
        }
        Ok(JetTensor {
            slots: slots.to_vec(),
            comps,
        })
    }

    pub fn scalar(x: WJet) -> JetTensor {
        JetTensor {
            slots: Vec::new(),
            comps: vec![x],
        }
    }

    pub fn vector(slot: Slot, v: &[WJet; 2]) -> JetTensor {
        JetTensor {
            slots: vec![slot],
            comps: v.to_vec(),
        }
    }

    pub fn matrix(slots: [Slot; 2], m: &[[WJet; 2]; 2]) -> JetTensor {
        JetTensor::from_fn(&slots, |i| m[i[0]][i[1]].clone())
    }

    pub fn rank3(slots: [Slot; 3], t: &T3) -> JetTensor {
        JetTensor::from_fn(&slots, |i| t[i[0]][i[1]][i[2]].clone())
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn get(&self, idx: &[usize]) -> &WJet {
        &self.comps[flat(idx)]
    }

    /// Base-point values in storage order.
    pub fn values(&self) -> Vec<Complex64> {
        self.comps.iter().map(WJet::value).collect()
    }

    pub fn max_abs_value(&self) -> f64 {
        self.comps
            .iter()
            .map(|c| c.value().norm())
            .fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(&WJet) -> WJet) -> JetTensor {
        JetTensor {
            slots: self.slots.clone(),
            comps: self.comps.iter().map(f).collect(),
        }
    }

    /// Contracts the last index with `v`.
    pub fn contract_last(&self, v: &[WJet; 2]) -> JetTensor {
        let r = self.rank();
        JetTensor::from_fn(&self.slots[..r - 1], |idx| {
            let mut a = idx.to_vec();
            a.push(0);
            let mut b = idx.to_vec();
            b.push(1);
            &(self.get(&a) * &v[0]) + &(self.get(&b) * &v[1])
        })
    }

    /// Contracts index `slot` with `v`.
    pub fn contract(&self, slot: usize, v: &[WJet; 2]) -> JetTensor {
        let mut slots = self.slots.clone();
        slots.remove(slot);
        JetTensor::from_fn(&slots, |idx| {
            let mut a = idx.to_vec();
            a.insert(slot, 0);
            let mut b = idx.to_vec();
            b.insert(slot, 1);
            &(self.get(&a) * &v[0]) + &(self.get(&b) * &v[1])
        })
    }
}

impl Geometry {
    /// Plain derivative along `dir` and the largest magnitude among its summands.
    fn direct_deriv(&self, x: &WJet, dir: Dir, k: usize) -> Result<(WJet, f64), JetError> {
        use crate::jet::Var;
        let (head, tail, n) = match dir {
            Dir::V => return Ok((self.vdot(x, k)?, 0.0)),
            Dir::VBar => return Ok((self.vdot_bar(x, k)?, 0.0)),
            Dir::H => (x.diff(Var::Z(k))?, [Var::Eta(0), Var::Eta(1)], &self.n),
            Dir::HBar => (
                x.diff(Var::ZBar(k))?,
                [Var::EtaBar(0), Var::EtaBar(1)],
                &self.n_bar,
            ),
        };
        let mut gross = head.value().norm();
        let mut out = head;
        for (j, v) in tail.into_iter().enumerate() {
            let t = &n[j][k] * &x.diff(v)?;
            gross = gross.max(t.value().norm());
            out -= t;
        }
        Ok((out, gross))
    }

    /// Covariant derivative along `dir`; the new index is appended last.
    ///
    /// Unbarred directions carry `L` (horizontal) or `C` (vertical) terms on unbarred
    /// slots only; barred directions carry the conjugate coefficients on barred slots.
    pub fn covariant(&self, x: &JetTensor, dir: Dir) -> Result<JetTensor, JetError> {
        Ok(self.covariant_gross(x, dir)?.0)
    }

    /// As [`Geometry::covariant`], also returning the largest base-point magnitude among
    /// the partial derivative and connection terms that were summed. Residual scales use
    /// it because those terms can cancel by many orders of magnitude.
    pub fn covariant_gross(&self, x: &JetTensor, dir: Dir) -> Result<(JetTensor, f64), JetError> {
        let gamma: &T3 = match dir {
            Dir::H => &self.lh,
            Dir::HBar => &self.lh_bar,
            Dir::V => &self.cv,
            Dir::VBar => &self.cv_bar,
        };
        let barred = dir.barred();
        let new_slot = if barred { Slot::DownBar } else { Slot::Down };
        let mut slots = x.slots.clone();
        slots.push(new_slot);
        let r = x.rank();
        let mut gross: f64 = 0.0;
        let mut derivs: Vec<[WJet; 2]> = Vec::with_capacity(x.comps.len());
        for c in &x.comps {
            let (d0, g0) = self.direct_deriv(c, dir, 0)?;
            let (d1, g1) = self.direct_deriv(c, dir, 1)?;
            gross = gross.max(g0).max(g1);
            derivs.push([d0, d1]);
        }
        let t = JetTensor::try_from_fn(&slots, |idx| {
            let k = idx[r];
            let base = &idx[..r];
            let mut acc = derivs[flat(base)][k].clone();
            gross = gross.max(acc.value().norm());
            for (s, slot) in x.slots.iter().enumerate() {
                let upper = match (slot, barred) {
                    (Slot::Up, false) | (Slot::UpBar, true) => true,
                    (Slot::Down, false) | (Slot::DownBar, true) => false,
                    _ => continue,
                };
                let a = base[s];
                for l in 0..2 {
                    let mut moved = base.to_vec();
                    moved[s] = l;
                    let term = x.get(&moved)
                        * (if upper {
                            &gamma[a][l][k]
                        } else {
                            &gamma[l][a][k]
                        });
                    gross = gross.max(term.value().norm());
                    if upper {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
            }
            Ok::<_, JetError>(acc)
        })?;
        Ok((t, gross))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricSpec;
    use crate::point::Point;

    fn geo(name: &str) -> Geometry {
        let m = MetricSpec::builtin(name, &[]).unwrap();
        let p = Point::from_parts((0.5, 0.1), (0.1, -0.05), (1.0, 0.2), (0.4, -0.3));
        Geometry::new(&m, &p, 5).unwrap()
    }

    #[test]
    fn flat_round_trip() {
        for n in 0..16 {
            assert_eq!(flat(&unflat(n, 4)), n);
        }
        assert_eq!(unflat(0b1011, 4), vec![1, 0, 1, 1]);
    }

    #[test]
    fn metric_is_parallel() {
        for name in ["hartogs-randers", "hartogs-kropina", "antonelli-shimada"] {
            let g = geo(name);
            let gt = JetTensor::matrix([Slot::Down, Slot::DownBar], &g.g);
            for dir in [Dir::H, Dir::HBar, Dir::V, Dir::VBar] {
                let d = g.covariant(&gt, dir).unwrap();
                assert!(
                    d.max_abs_value() < 1e-9 * (1.0 + gt.max_abs_value()),
                    "{name} {dir:?}"
                );
            }
        }
    }

    #[test]
    fn eta_derivatives() {
        let g = geo("antonelli-shimada");
        let eta = JetTensor::vector(Slot::Up, &g.eta);
        let v = g.covariant(&eta, Dir::V).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((v.get(&[i, k]).value() - Complex64::new(want, 0.0)).norm() < 1e-10);
            }
        }
        assert!(g.covariant(&eta, Dir::H).unwrap().max_abs_value() < 1e-10);
        assert!(g.covariant(&eta, Dir::HBar).unwrap().max_abs_value() < 1e-10);
    }
}
