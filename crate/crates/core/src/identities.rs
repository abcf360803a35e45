//! Residual suites for the identities of the Chern-Finsler connection, the Berwald
//! frame and the curvature tensors, evaluated at one point.
//!
//! Every residual is `|Σ terms| / max(1, largest |term|)`, taken over all components.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curvature::{four_contract, Curvature, Invariants};
use crate::error::Result;
use crate::frame::Frame;
use crate::geometry::{Geometry, Vec2};
use crate::jet::{JetError, WJet};
use crate::metric::{validate_homogeneity, MetricSpec};
use crate::point::Point;
use crate::tensor::{unflat, Dir, JetTensor, Slot};

type C = Complex64;

/// Everything computed at one point: connection, frame, curvature, invariants.
#[derive(Clone, Debug)]
pub struct PointData {
    pub geo: Geometry,
    pub fr: Frame,
    pub curv: Curvature,
    pub inv: Invariants,
}

impl PointData {
    pub fn new(spec: &MetricSpec, point: &Point, order: usize) -> Result<PointData> {
        PointData::from_geometry(Geometry::new(spec, point, order)?)
    }

    pub fn from_geometry(geo: Geometry) -> Result<PointData> {
        let fr = Frame::new(&geo)?;
        let curv = Curvature::new(&geo)?;
        let inv = Invariants::new(&geo, &fr)?;
        Ok(PointData { geo, fr, curv, inv })
    }
}

/// Identity suites. The external names (`name`, serde) are the ones the CLI accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Homogeneity,
    MetricCompatibility,
    #[serde(rename = "prop21")]
    ConnectionCurvature,
    #[serde(rename = "prop22")]
    Commutation,
    Frames,
    #[serde(rename = "prop42")]
    ConjugateFrameDerivatives,
    #[serde(rename = "prop43")]
    HolomorphicFrameDerivatives,
    HhDecomposition,
    Bianchi,
    #[serde(rename = "theorem41")]
    InvariantDerivatives,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Homogeneity,
        Suite::MetricCompatibility,
        Suite::ConnectionCurvature,
        Suite::Commutation,
        Suite::Frames,
        Suite::ConjugateFrameDerivatives,
        Suite::HolomorphicFrameDerivatives,
        Suite::HhDecomposition,
        Suite::Bianchi,
        Suite::InvariantDerivatives,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Homogeneity => "homogeneity",
            Suite::MetricCompatibility => "metric-compatibility",
            Suite::ConnectionCurvature => "prop21",
            Suite::Commutation => "prop22",
            Suite::Frames => "frames",
            Suite::ConjugateFrameDerivatives => "prop42",
            Suite::HolomorphicFrameDerivatives => "prop43",
            Suite::HhDecomposition => "hh-decomposition",
            Suite::Bianchi => "bianchi",
            Suite::InvariantDerivatives => "theorem41",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Jet order needed by the deepest check in the suite.
    pub fn min_order(self) -> usize {
        match self {
            Suite::Homogeneity
            | Suite::Frames
            | Suite::ConjugateFrameDerivatives
            | Suite::HolomorphicFrameDerivatives
            | Suite::HhDecomposition => 4,
            Suite::MetricCompatibility
            | Suite::ConnectionCurvature
            | Suite::Commutation
            | Suite::InvariantDerivatives => 5,
            Suite::Bianchi => 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn worst(&self) -> Option<&Check> {
        self.checks
            .iter()
            .max_by(|a, b| a.residual.total_cmp(&b.residual))
    }

    /// NaN residuals count as failures.
    pub fn passed(&self, tol: f64) -> bool {
        self.checks.iter().all(|c| c.residual <= tol)
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Acc {
    diff: f64,
    scale: f64,
}

impl Acc {
    fn eq(&mut self, lhs: C, rhs: C) {
        self.terms(&[lhs, -rhs]);
    }

    /// Records the identity `Σ terms = 0`.
    fn terms(&mut self, terms: &[C]) {
        let s: C = terms.iter().sum();
        self.diff = nan_max(self.diff, s.norm());
        for t in terms {
            self.scale = self.scale.max(t.norm());
        }
    }

    /// Raises the scale to the magnitude of terms summed inside a derivative.
    fn floor(&mut self, gross: f64) {
        self.scale = self.scale.max(gross);
    }

    fn residual(&self) -> f64 {
        self.diff / self.scale.max(1.0)
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

#[derive(Default)]
struct Out(Vec<Check>);

impl Out {
    fn push(&mut self, name: &str, acc: Acc) {
        self.0.push(Check {
            name: name.to_string(),
            residual: acc.residual(),
        });
    }

    fn one(&mut self, name: &str, f: impl FnOnce(&mut Acc)) {
        let mut acc = Acc::default();
        f(&mut acc);
        self.push(name, acc);
    }

    fn finish(self, suite: Suite) -> SuiteReport {
        SuiteReport {
            suite,
            checks: self.0,
        }
    }
}

/// Compares every component of `t` against `want(idx)`.
fn tensor_eq(acc: &mut Acc, t: &JetTensor, want: impl Fn(&[usize]) -> C) {
    for (n, c) in t.comps.iter().enumerate() {
        let idx = unflat(n, t.rank());
        acc.eq(c.value(), want(&idx));
    }
}

fn v2(v: &Vec2) -> [C; 2] {
    [v[0].value(), v[1].value()]
}

/// Base-point values of the frame and the frame scalars.
struct Vals {
    f: C,
    l: [C; 2],
    lu: [C; 2],
    m: [C; 2],
    mu: [C; 2],
    lb: [C; 2],
    mb: [C; 2],
    a: C,
    b: C,
    ab: C,
    bb: C,
    s: [C; 8],
    sb: [C; 8],
}

const J: usize = 0;
const U: usize = 1;
const V: usize = 2;
const X: usize = 3;
const O: usize = 4;
const Y: usize = 5;
const E: usize = 6;
const H: usize = 7;

impl Vals {
    fn new(pd: &PointData) -> Vals {
        let fr = &pd.fr;
        let s = fr.hs.as_array().map(WJet::value);
        Vals {
            f: pd.geo.fin.value(),
            l: v2(&fr.l_dn),
            lu: v2(&fr.l_up),
            m: v2(&fr.m_dn),
            mu: v2(&fr.m_up),
            lb: v2(&fr.l_dn_bar),
            mb: v2(&fr.m_dn_bar),
            a: fr.a.value(),
            b: fr.b.value(),
            ab: fr.a_bar.value(),
            bb: fr.b_bar.value(),
            sb: s.map(|x| x.conj()),
            s,
        }
    }
}

type Op = fn(&Frame, &Geometry, &WJet) -> std::result::Result<WJet, JetError>;

fn apply(pd: &PointData, op: Op, x: &WJet) -> std::result::Result<C, JetError> {
    Ok(op(&pd.fr, &pd.geo, x)?.value())
}

fn apply_vec(pd: &PointData, op: Op, v: &Vec2) -> std::result::Result<[C; 2], JetError> {
    Ok([apply(pd, op, &v[0])?, apply(pd, op, &v[1])?])
}

fn comb(terms: &[(C, [C; 2])]) -> [C; 2] {
    let mut out = [C::new(0.0, 0.0); 2];
    for (c, v) in terms {
        out[0] += c * v[0];
        out[1] += c * v[1];
    }
    out
}

fn vec_eq(acc: &mut Acc, got: [C; 2], want: [C; 2]) {
    acc.eq(got[0], want[0]);
    acc.eq(got[1], want[1]);
}

/// Runs one suite; `spec` is only consulted by the homogeneity suite.
pub fn run_suite(suite: Suite, spec: &MetricSpec, pd: &PointData) -> Result<SuiteReport> {
    let order = pd.geo.order();
    if order < suite.min_order() {
        return Err(JetError::OrderBudget {
            quantity: format!("{} suite", suite.name()),
            needed: suite.min_order(),
            available: order,
        }
        .into());
    }
    let checks = match suite {
        Suite::Homogeneity => homogeneity(spec, pd)?,
        Suite::MetricCompatibility => metric_compatibility(pd)?,
        Suite::ConnectionCurvature => connection_curvature(pd)?,
        Suite::Commutation => commutation(pd)?,
        Suite::Frames => frames(pd)?,
        Suite::ConjugateFrameDerivatives => conjugate_frame_derivatives(pd)?,
        Suite::HolomorphicFrameDerivatives => holomorphic_frame_derivatives(pd)?,
        Suite::HhDecomposition => hh_decomposition(pd)?,
        Suite::Bianchi => bianchi(pd)?,
        Suite::InvariantDerivatives => invariant_derivatives(pd)?,
    };
    Ok(checks.finish(suite))
}

pub fn run_suites(suites: &[Suite], spec: &MetricSpec, pd: &PointData) -> Result<Vec<SuiteReport>> {
    suites.iter().map(|&s| run_suite(s, spec, pd)).collect()
}

fn homogeneity(spec: &MetricSpec, pd: &PointData) -> Result<Out> {
    let h = validate_homogeneity(spec, pd.geo.point(), 4, 0)?;
    let mut out = Out::default();
    for (name, r) in [
        ("euler L", h.euler_l),
        ("euler g", h.euler_g),
        ("L = g eta etabar", h.quadratic_form),
        ("F(z, c eta) = |c| F", h.scaling),
    ] {
        out.0.push(Check {
            name: name.into(),
            residual: r,
        });
    }
    Ok(out)
}

fn metric_compatibility(pd: &PointData) -> std::result::Result<Out, JetError> {
    let geo = &pd.geo;
    let mut out = Out::default();
    let zero = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    let g = JetTensor::matrix([Slot::Down, Slot::DownBar], &geo.g);
    for (dir, name) in [
        (Dir::H, "g|k"),
        (Dir::HBar, "g|kbar"),
        (Dir::V, "g|_k"),
        (Dir::VBar, "g|_kbar"),
    ] {
        let d = geo.covariant(&g, dir)?;
        out.one(name, |acc| {
            acc.scale = g.max_abs_value();
            tensor_eq(acc, &d, |_| zero);
        });
    }
    let eta = JetTensor::vector(Slot::Up, &geo.eta);
    for (dir, name) in [
        (Dir::H, "eta|k"),
        (Dir::HBar, "eta|kbar"),
        (Dir::V, "eta|_k = delta"),
        (Dir::VBar, "eta|_kbar"),
    ] {
        let d = geo.covariant(&eta, dir)?;
        out.one(name, |acc| {
            tensor_eq(acc, &d, |x| {
                if dir == Dir::V && x[0] == x[1] {
                    one
                } else {
                    zero
                }
            });
        });
    }
    let geta = JetTensor::vector(Slot::Down, &[0, 1].map(|i| geo.contract_eta_bar(&geo.g[i])));
    for (dir, name) in [
        (Dir::H, "(g etabar)|k"),
        (Dir::HBar, "(g etabar)|kbar"),
        (Dir::V, "(g etabar)|_k"),
        (Dir::VBar, "(g etabar)|_kbar = g"),
    ] {
        let d = geo.covariant(&geta, dir)?;
        out.one(name, |acc| {
            acc.scale = geta.max_abs_value();
            tensor_eq(acc, &d, |x| {
                if dir == Dir::VBar {
                    geo.g[x[0]][x[1]].value()
                } else {
                    zero
                }
            });
        });
    }
    let eta0 = v2(&geo.eta);
    out.one("N = L eta", |acc| {
        for i in 0..2 {
            for k in 0..2 {
                let rhs = geo.lh[i][0][k].value() * eta0[0] + geo.lh[i][1][k].value() * eta0[1];
                acc.eq(geo.n[i][k].value(), rhs);
            }
        }
    });
    let mut acc = Acc::default();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                acc.eq(geo.vdot(&geo.n[i][k], j)?.value(), geo.lh[i][j][k].value());
            }
        }
    }
    out.push("dot_j N^i_k = L^i_jk", acc);
    let mut acc = Acc::default();
    let mut acc_c = Acc::default();
    let mut acc_0 = Acc::default();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let mut l = C::new(0.0, 0.0);
                let mut c = C::new(0.0, 0.0);
                for s in 0..2 {
                    let gi = geo.g_inv[s][i].value();
                    l += gi * geo.delta(&geo.g[j][s], k)?.value();
                    c += gi * geo.vdot(&geo.g[j][s], k)?.value();
                }
                acc.eq(geo.lh[i][j][k].value(), l);
                acc_c.eq(geo.cv[i][j][k].value(), c);
                acc_c.eq(geo.cv[i][j][k].value(), geo.cv[i][k][j].value());
            }
            let c0 = geo.cv[i][0][j].value() * eta0[0] + geo.cv[i][1][j].value() * eta0[1];
            acc_0.terms(&[c0]);
        }
    }
    out.push("L = g^-1 delta g", acc);
    out.push("C = g^-1 dot g, symmetric", acc_c);
    out.push("C_0 = 0", acc_0);
    let spray = geo.spray()?;
    let br = geo.berwald_rund(&spray)?;
    out.one("2G = B-L eta eta", |acc| {
        for i in 0..2 {
            let mut rhs = C::new(0.0, 0.0);
            for j in 0..2 {
                for k in 0..2 {
                    rhs += br.bl[i][j][k].value() * eta0[j] * eta0[k];
                }
            }
            acc.eq(spray.g[i].value() * 2.0, rhs);
            let nc = spray.nc[i][0].value() * eta0[0] + spray.nc[i][1].value() * eta0[1];
            acc.eq(spray.g[i].value() * 2.0, nc);
        }
    });
    Ok(out)
}

/// `Σ_j X^i_{jh̄k} η^j` for an upper curvature block, indexed `[i][h][k]`.
fn contract_zero(geo: &Geometry, x: &JetTensor) -> JetTensor {
    x.contract(1, &geo.eta)
}

fn connection_curvature(pd: &PointData) -> std::result::Result<Out, JetError> {
    let (geo, curv) = (&pd.geo, &pd.curv);
    let mut out = Out::default();
    let r0 = contract_zero(geo, &curv.r_up);
    let mut acc = Acc::default();
    for i in 0..2 {
        for h in 0..2 {
            for k in 0..2 {
                acc.terms(&[
                    r0.get(&[i, h, k]).value(),
                    geo.delta_bar(&geo.n[i][k], h)?.value(),
                ]);
            }
        }
    }
    out.push("R^i_0hk = -delta_hbar N^i_k", acc);

    let p0 = contract_zero(geo, &curv.p_up);
    let mut acc = Acc::default();
    for i in 0..2 {
        for h in 0..2 {
            for k in 0..2 {
                acc.terms(&[
                    p0.get(&[i, h, k]).value(),
                    geo.vdot_bar(&geo.n[i][k], h)?.value(),
                ]);
            }
        }
    }
    out.push("P^i_0hk = -dot_hbar N^i_k", acc);

    // C_{0r̄h̄} = η^l ∂̇_h̄ g_{lr̄}, indexed [r][h]
    let c0 = JetTensor::try_from_fn(&[Slot::DownBar, Slot::DownBar], |x| {
        Ok::<_, JetError>(
            &geo.vdot_bar(&geo.g[0][x[0]], x[1])? * &geo.eta[0]
                + &geo.vdot_bar(&geo.g[1][x[0]], x[1])? * &geo.eta[1],
        )
    })?;
    let (c0k, c0k_g) = geo.covariant_gross(&c0, Dir::H)?;
    let p_low0 = curv.p.contract(1, &geo.eta);
    out.one("P_r0hk = -C_0rh|k", |acc| {
        acc.floor(c0k_g);
        for r in 0..2 {
            for h in 0..2 {
                for k in 0..2 {
                    acc.terms(&[p_low0.get(&[r, h, k]).value(), c0k.get(&[r, h, k]).value()]);
                }
            }
        }
    });
    let p00 = p0.contract(1, &geo.eta_bar);
    out.one("P^i_00k = 0", |acc| {
        for c in &p00.comps {
            acc.terms(&[c.value()]);
        }
    });

    // C_{jr̄k} = g_{ir̄} C^i_{jk}, indexed [j][r][k]
    let c_low = JetTensor::from_fn(&[Slot::Down, Slot::DownBar, Slot::Down], |x| {
        let (j, r, k) = (x[0], x[1], x[2]);
        &(&geo.g[0][r] * &geo.cv[0][j][k]) + &(&geo.g[1][r] * &geo.cv[1][j][k])
    });
    let (c_hbar, c_hbar_g) = geo.covariant_gross(&c_low, Dir::HBar)?;
    let (c_vbar, c_vbar_g) = geo.covariant_gross(&c_low, Dir::VBar)?;
    out.one("Xi = -C|hbar", |acc| {
        acc.floor(c_hbar_g);
        for n in 0..16 {
            let x = unflat(n, 4);
            let (r, j, h, k) = (x[0], x[1], x[2], x[3]);
            acc.terms(&[curv.xi.get(&x).value(), c_hbar.get(&[j, r, k, h]).value()]);
        }
    });
    out.one("S = -C|_hbar", |acc| {
        acc.floor(c_vbar_g);
        for n in 0..16 {
            let x = unflat(n, 4);
            let (r, j, h, k) = (x[0], x[1], x[2], x[3]);
            acc.terms(&[curv.s.get(&x).value(), c_vbar.get(&[j, r, k, h]).value()]);
        }
    });
    out.one("Xi^i_0hk = Xi^i_kh0 = S^i_0hk = S^i_kh0 = 0", |acc| {
        for t in [&curv.xi_up, &curv.s_up] {
            for c in t
                .contract(1, &geo.eta)
                .comps
                .iter()
                .chain(&t.contract(3, &geo.eta).comps)
            {
                acc.terms(&[c.value()]);
            }
        }
    });

    // C_{lr̄h̄} = ∂̇_h̄ g_{lr̄} and C_{lr̄h} = ∂̇_h g_{lr̄}, both indexed [l][r][h]
    let c_bar = JetTensor::try_from_fn(&[Slot::Down, Slot::DownBar, Slot::DownBar], |x| {
        geo.vdot_bar(&geo.g[x[0]][x[1]], x[2])
    })?;
    let c_unb = JetTensor::try_from_fn(&[Slot::Down, Slot::DownBar, Slot::Down], |x| {
        geo.vdot(&geo.g[x[0]][x[1]], x[2])
    })?;
    let (c_bar_k, c_bar_k_g) = geo.covariant_gross(&c_bar, Dir::H)?;
    let (c_unb_k, c_unb_k_g) = geo.covariant_gross(&c_unb, Dir::H)?;
    let mut acc4 = Acc::default();
    let mut acc5 = Acc::default();
    acc4.floor(c_bar_k_g);
    acc5.floor(c_unb_k_g);
    for n in 0..16 {
        let x = unflat(n, 4);
        let (l, r, h, k) = (x[0], x[1], x[2], x[3]);
        let mut t4 = vec![c_bar_k.get(&x).value()];
        let mut t5 = vec![c_unb_k.get(&x).value()];
        for i in 0..2 {
            let g = geo.g[i][r].value();
            t4.push(-geo.vdot_bar(&geo.lh[i][l][k], h)?.value() * g);
            t4.push(-geo.vdot_bar(&geo.n[i][k], h)?.value() * c_unb.get(&[i, r, l]).value());
            t5.push(-geo.vdot(&geo.lh[i][l][k], h)?.value() * g);
        }
        acc4.terms(&t4);
        acc5.terms(&t5);
    }
    out.push("C_lrh|k expansion (hbar)", acc4);
    out.push("C_lrh|k = (dot_h L^i_lk) g_ir", acc5);

    // P^i_{0h̄k} as a tensor [i][h][k]; its vertical derivative appends j
    let p0t = JetTensor {
        slots: vec![Slot::Up, Slot::DownBar, Slot::Down],
        comps: p0.comps.clone(),
    };
    let (p0j, p0j_g) = geo.covariant_gross(&p0t, Dir::V)?;
    out.one("P^i_jhk = P^i_0hk|_j + P^i_0hr C^r_kj", |acc| {
        acc.floor(p0j_g);
        for n in 0..16 {
            let x = unflat(n, 4);
            let (i, j, h, k) = (x[0], x[1], x[2], x[3]);
            let mut t = vec![curv.p_up.get(&x).value(), -p0j.get(&[i, h, k, j]).value()];
            for r in 0..2 {
                t.push(-p0.get(&[i, h, r]).value() * geo.cv[r][k][j].value());
            }
            acc.terms(&t);
        }
    });

    out.one("conjugation symmetries of R, Xi/P, S", |acc| {
        for n in 0..16 {
            let x = unflat(n, 4);
            let (i, j, k, h) = (x[0], x[1], x[2], x[3]);
            acc.eq(
                curv.r.get(&[i, j, k, h]).value().conj(),
                curv.r.get(&[j, i, h, k]).value(),
            );
            acc.eq(
                curv.xi.get(&[i, j, k, h]).value().conj(),
                curv.p.get(&[j, i, h, k]).value(),
            );
            acc.eq(
                curv.s.get(&[i, j, k, h]).value().conj(),
                curv.s.get(&[j, i, h, k]).value(),
            );
            acc.eq(
                curv.s.get(&[j, i, h, k]).value(),
                curv.s.get(&[h, i, j, k]).value(),
            );
        }
    });
    Ok(out)
}

fn commutation(pd: &PointData) -> std::result::Result<Out, JetError> {
    let geo = &pd.geo;
    let mut out = Out::default();
    let p0 = contract_zero(geo, &pd.curv.p_up);
    for (name, x) in [
        ("A bar", &pd.fr.a_bar),
        ("B bar", &pd.fr.b_bar),
        ("F", &geo.fin),
    ] {
        let s = JetTensor::scalar(x.clone());
        let (xv, xv_g) = geo.covariant_gross(&s, Dir::V)?;
        let (xh, xh_g) = geo.covariant_gross(&s, Dir::H)?;
        let (xvbar, xvbar_g) = geo.covariant_gross(&s, Dir::VBar)?;
        let (v_h, v_h_g) = geo.covariant_gross(&xv, Dir::H)?;
        let (h_v, h_v_g) = geo.covariant_gross(&xh, Dir::V)?;
        let (vbar_h, vbar_h_g) = geo.covariant_gross(&xvbar, Dir::H)?;
        let (h_vbar, h_vbar_g) = geo.covariant_gross(&xh, Dir::VBar)?;
        out.one(&format!("{name}: X|_k|j - X|j|_k = C^i_jk X|i"), |acc| {
            acc.floor(xh_g.max(v_h_g).max(h_v_g));
            for j in 0..2 {
                for k in 0..2 {
                    let mut t = vec![v_h.get(&[k, j]).value(), -h_v.get(&[j, k]).value()];
                    for i in 0..2 {
                        t.push(-geo.cv[i][j][k].value() * xh.get(&[i]).value());
                    }
                    acc.terms(&t);
                }
            }
        });
        out.one(
            &format!("{name}: X|_kbar|j - X|j|_kbar = -P^i_0kj X|_i"),
            |acc| {
                acc.floor(xh_g.max(xv_g).max(xvbar_g).max(vbar_h_g).max(h_vbar_g));
                for j in 0..2 {
                    for k in 0..2 {
                        let mut t = vec![vbar_h.get(&[k, j]).value(), -h_vbar.get(&[j, k]).value()];
                        for i in 0..2 {
                            t.push(p0.get(&[i, k, j]).value() * xv.get(&[i]).value());
                        }
                        acc.terms(&t);
                    }
                }
            },
        );
    }
    Ok(out)
}

fn frames(pd: &PointData) -> std::result::Result<Out, JetError> {
    let (geo, fr) = (&pd.geo, &pd.fr);
    let w = Vals::new(pd);
    let mut out = Out::default();
    let one = C::new(1.0, 0.0);
    let (f, a, b, bb) = (w.f, w.a, w.b, w.bb);
    let (i2f, i1f) = (one / (2.0 * f), one / f);
    let zero2 = [C::new(0.0, 0.0); 2];

    let vertical: [(Op, &Vec2, [C; 2]); 16] = [
        (Frame::l, &fr.l_dn, comb(&[(-i2f, w.l)])),
        (Frame::l_bar, &fr.l_dn, comb(&[(i2f, w.l)])),
        (Frame::l, &fr.m_dn, comb(&[(i2f, w.m)])),
        (Frame::l_bar, &fr.m_dn, comb(&[(-i2f, w.m)])),
        (Frame::m, &fr.l_dn, comb(&[(a, w.m)])),
        (Frame::m_bar, &fr.l_dn, comb(&[(i1f, w.m)])),
        (Frame::m, &fr.m_dn, comb(&[(b / 2.0, w.m), (-i1f, w.l)])),
        (Frame::m_bar, &fr.m_dn, comb(&[(bb / 2.0, w.m)])),
        (Frame::l, &fr.l_up, comb(&[(i2f, w.lu)])),
        (Frame::l_bar, &fr.l_up, comb(&[(-i2f, w.lu)])),
        (Frame::l, &fr.m_up, comb(&[(-i2f, w.mu)])),
        (Frame::l_bar, &fr.m_up, comb(&[(i2f, w.mu)])),
        (Frame::m, &fr.l_up, comb(&[(i1f, w.mu)])),
        (Frame::m_bar, &fr.l_up, zero2),
        (Frame::m, &fr.m_up, comb(&[(-b / 2.0, w.mu), (-a, w.lu)])),
        (
            Frame::m_bar,
            &fr.m_up,
            comb(&[(-i1f, w.lu), (-bb / 2.0, w.mu)]),
        ),
    ];
    let mut acc = Acc::default();
    for (op, vecj, want) in &vertical {
        vec_eq(&mut acc, apply_vec(pd, *op, vecj)?, *want);
    }
    out.push("vertical frame derivatives l, lbar, m, mbar", acc);

    // covariant vertical derivatives of the frame vectors, indexed [i][j]
    let vt = |slot, v: &Vec2, dir| geo.covariant(&JetTensor::vector(slot, v), dir);
    let delta = |i: usize, j: usize| if i == j { one } else { C::new(0.0, 0.0) };
    // l_i|_j carries no A m_i m_j term: that term belongs to the plain ∂̇_j l_i
    let cases: [(&str, Slot, &Vec2, Dir, Box<dyn Fn(usize, usize) -> C>); 8] = [
        (
            "l_i|_j",
            Slot::Down,
            &fr.l_dn,
            Dir::V,
            Box::new(|i, j| -w.l[i] * w.l[j] * i2f),
        ),
        (
            "l_i|_jbar",
            Slot::Down,
            &fr.l_dn,
            Dir::VBar,
            Box::new(|i, j| w.l[i] * w.lb[j] * i2f + w.m[i] * w.mb[j] * i1f),
        ),
        (
            "m_i|_j",
            Slot::Down,
            &fr.m_dn,
            Dir::V,
            Box::new(|i, j| {
                w.m[i] * w.l[j] * i2f - w.l[i] * w.m[j] * i1f - b / 2.0 * w.m[i] * w.m[j]
            }),
        ),
        (
            "m_i|_jbar",
            Slot::Down,
            &fr.m_dn,
            Dir::VBar,
            Box::new(|i, j| -w.m[i] * w.lb[j] * i2f + bb / 2.0 * w.m[i] * w.mb[j]),
        ),
        (
            "l^i|_j",
            Slot::Up,
            &fr.l_up,
            Dir::V,
            Box::new(|i, j| delta(i, j) * i1f - w.l[j] * w.lu[i] * i2f),
        ),
        (
            "l^i|_jbar",
            Slot::Up,
            &fr.l_up,
            Dir::VBar,
            Box::new(|i, j| -w.lb[j] * w.lu[i] * i2f),
        ),
        (
            "m^i|_j",
            Slot::Up,
            &fr.m_up,
            Dir::V,
            Box::new(|i, j| -w.l[j] * w.mu[i] * i2f + b / 2.0 * w.m[j] * w.mu[i]),
        ),
        (
            "m^i|_jbar",
            Slot::Up,
            &fr.m_up,
            Dir::VBar,
            Box::new(|i, j| {
                w.lb[j] * w.mu[i] * i2f - w.mb[j] * w.lu[i] * i1f - bb / 2.0 * w.mb[j] * w.mu[i]
            }),
        ),
    ];
    let mut acc = Acc::default();
    for (_, slot, v, dir, want) in &cases {
        let t = vt(*slot, v, *dir)?;
        tensor_eq(&mut acc, &t, |x| want(x[0], x[1]));
    }
    for j in 0..2 {
        acc.eq(geo.vdot(&geo.fin, j)?.value(), w.l[j] / 2.0);
    }
    out.push(
        "covariant vertical derivatives of l, m and F|_j = l_j/2",
        acc,
    );

    let ma = apply(pd, Frame::m, &fr.a)?;
    let mb = apply(pd, Frame::m, &fr.b)?;
    let mba = apply(pd, Frame::m_bar, &fr.a)?;
    let mbb = apply(pd, Frame::m_bar, &fr.b)?;
    let mut acc = Acc::default();
    for h in 0..2 {
        acc.eq(
            geo.vdot_bar(&fr.a, h)?.value(),
            1.5 * a * i1f * w.lb[h] + mba * w.mb[h],
        );
        acc.eq(
            geo.vdot_bar(&fr.b, h)?.value(),
            0.5 * b * i1f * w.lb[h] + mbb * w.mb[h],
        );
        acc.eq(
            geo.vdot(&fr.a, h)?.value(),
            -2.5 * a * i1f * w.l[h] + ma * w.m[h],
        );
        acc.eq(
            geo.vdot(&fr.b, h)?.value(),
            -1.5 * b * i1f * w.l[h] + mb * w.m[h],
        );
    }
    out.push("vertical derivatives of A, B", acc);

    let (s, sb) = (&w.s, &w.sb);
    let jy = s[J] + s[Y];
    let vh = s[V] + s[H];
    let jyb = sb[J] + sb[Y];
    let vhb = sb[V] + sb[H];
    let horizontal: [(Op, &Vec2, [C; 2]); 16] = [
        (Frame::lambda, &fr.l_dn, comb(&[(s[J], w.l), (s[U], w.m)])),
        (Frame::lambda_bar, &fr.l_dn, zero2),
        (Frame::lambda_bar, &fr.l_up, zero2),
        (
            Frame::lambda,
            &fr.l_up,
            comb(&[(-s[J], w.lu), (-s[O], w.mu)]),
        ),
        (
            Frame::lambda,
            &fr.m_dn,
            comb(&[(s[O], w.l), (-(s[J] - s[Y]) / 2.0, w.m)]),
        ),
        (Frame::lambda_bar, &fr.m_dn, comb(&[(jyb / 2.0, w.m)])),
        (
            Frame::lambda,
            &fr.m_up,
            comb(&[(-s[U], w.lu), ((s[J] - s[Y]) / 2.0, w.mu)]),
        ),
        (Frame::lambda_bar, &fr.m_up, comb(&[(-jyb / 2.0, w.mu)])),
        (Frame::mu, &fr.l_dn, comb(&[(s[V], w.l), (s[X], w.m)])),
        (Frame::mu_bar, &fr.l_dn, zero2),
        (Frame::mu_bar, &fr.l_up, zero2),
        (Frame::mu, &fr.l_up, comb(&[(-s[V], w.lu), (-s[E], w.mu)])),
        (
            Frame::mu,
            &fr.m_dn,
            comb(&[(s[E], w.l), ((s[H] - s[V]) / 2.0, w.m)]),
        ),
        (Frame::mu_bar, &fr.m_dn, comb(&[(vhb / 2.0, w.m)])),
        (
            Frame::mu,
            &fr.m_up,
            comb(&[(-s[X], w.lu), (-(s[H] - s[V]) / 2.0, w.mu)]),
        ),
        (Frame::mu_bar, &fr.m_up, comb(&[(-vhb / 2.0, w.mu)])),
    ];
    let mut acc = Acc::default();
    for (op, vecj, want) in &horizontal {
        vec_eq(&mut acc, apply_vec(pd, *op, vecj)?, *want);
    }
    let det = geo.det.value();
    acc.eq(apply(pd, Frame::lambda, &geo.det)?, jy * det);
    acc.eq(apply(pd, Frame::mu, &geo.det)?, vh * det);
    acc.terms(&[apply(pd, Frame::lambda, &geo.lag)?]);
    acc.terms(&[apply(pd, Frame::mu, &geo.lag)?]);
    let (la, mua) = (
        apply(pd, Frame::lambda, &fr.a)?,
        apply(pd, Frame::mu, &fr.a)?,
    );
    for i in 0..2 {
        acc.eq(geo.delta(&fr.a, i)?.value(), w.l[i] * la + w.m[i] * mua);
    }
    out.push(
        "horizontal frame derivatives lambda, mu and their bars",
        acc,
    );

    let mut acc = Acc::default();
    for dir in [Dir::H, Dir::HBar] {
        for (slot, v) in [(Slot::Down, &fr.l_dn), (Slot::Up, &fr.l_up)] {
            let t = vt(slot, v, dir)?;
            acc.scale = acc.scale.max(t.max_abs_value());
            tensor_eq(&mut acc, &t, |_| C::new(0.0, 0.0));
        }
    }
    let hj = |j: usize| jy * w.l[j] + vh * w.m[j];
    let hjb = |j: usize| jyb * w.lb[j] + vhb * w.mb[j];
    tensor_eq(&mut acc, &vt(Slot::Down, &fr.m_dn, Dir::H)?, |x| {
        -0.5 * hj(x[1]) * w.m[x[0]]
    });
    tensor_eq(&mut acc, &vt(Slot::Down, &fr.m_dn, Dir::HBar)?, |x| {
        0.5 * hjb(x[1]) * w.m[x[0]]
    });
    tensor_eq(&mut acc, &vt(Slot::Up, &fr.m_up, Dir::H)?, |x| {
        0.5 * hj(x[1]) * w.mu[x[0]]
    });
    tensor_eq(&mut acc, &vt(Slot::Up, &fr.m_up, Dir::HBar)?, |x| {
        -0.5 * hjb(x[1]) * w.mu[x[0]]
    });
    out.push("horizontal covariant derivatives of l, m", acc);

    let mut acc = Acc::default();
    for k in 0..2 {
        let (l, m) = (w.l[k], w.m[k]);
        acc.eq(
            geo.vdot(&fr.hs.j, k)?.value(),
            s[J] * l * i2f + ((s[U] + s[V]) * i1f + a * s[O]) * m,
        );
        acc.eq(
            geo.vdot(&fr.hs.v, k)?.value(),
            -s[V] * l * i2f + (a * (s[E] - s[J]) - 0.5 * b * s[V] + s[X] * i1f) * m,
        );
        acc.eq(
            geo.vdot(&fr.hs.o, k)?.value(),
            1.5 * s[O] * l * i1f + ((s[E] + s[Y] - s[J]) * i1f + 0.5 * b * s[O]) * m,
        );
        acc.eq(
            geo.vdot(&fr.hs.e, k)?.value(),
            s[E] * l * i2f + ((s[H] - s[V]) * i1f - a * s[O]) * m,
        );
    }
    out.push("vertical derivatives of J, V, O, E", acc);

    let mut acc = Acc::default();
    let cr = fr.c_from_scalars();
    let lr = fr.l_from_scalars();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                acc.eq(geo.cv[i][j][k].value(), cr[i][j][k].value());
                acc.eq(geo.lh[i][j][k].value(), lr[i][j][k].value());
            }
        }
    }
    out.push("C and L rebuilt from A, B, J..H", acc);

    let tor = geo.torsion();
    let spray = geo.spray()?;
    let mut acc = Acc::default();
    for k in 0..2 {
        acc.eq(tor.form[k].value(), f * f * (s[V] - s[U]) * w.m[k]);
        acc.eq(
            spray.g[k].value(),
            f * f / 2.0 * (s[J] * w.lu[k] + s[O] * w.mu[k]),
        );
    }
    out.push("torsion form and spray in the frame", acc);
    Ok(out)
}

fn conjugate_frame_derivatives(pd: &PointData) -> std::result::Result<Out, JetError> {
    let (geo, fr) = (&pd.geo, &pd.fr);
    let w = Vals::new(pd);
    let (f, a, ab, b, bb) = (w.f, w.a, w.ab, w.b, w.bb);
    let (s, one) = (&w.s, C::new(1.0, 0.0));
    let (i2f, i1f) = (one / (2.0 * f), one / f);
    let hs = &fr.hs;
    let mut out = Out::default();

    let mut acc = Acc::default();
    for k in 0..2 {
        acc.eq(
            geo.vdot_bar(&hs.j, k)?.value(),
            -s[J] * w.lb[k] * i2f + s[O] * w.mb[k] * i1f,
        );
        acc.eq(
            geo.vdot_bar(&hs.v, k)?.value(),
            s[V] * w.lb[k] * i2f + ((s[E] - s[J]) * i1f - 0.5 * bb * s[V]) * w.mb[k],
        );
    }
    out.push("J|_kbar, V|_kbar", acc);

    let lb = |x: &WJet| apply(pd, Frame::l_bar, x);
    let mbar = |x: &WJet| apply(pd, Frame::m_bar, x);
    // the coefficient is minus the η̄-degree; X has degree 3/2
    let mut acc = Acc::default();
    for (x, c) in [
        (&hs.u, -0.5),
        (&hs.x, -1.5),
        (&hs.o, 1.5),
        (&hs.y, 0.5),
        (&hs.e, 0.5),
        (&hs.h, -0.5),
    ] {
        let xv = x.value();
        acc.terms(&[lb(x)?, c * xv * i1f]);
    }
    out.push("lbar(U, X, O, Y, E, H)", acc);

    let mo = mbar(&hs.o)? - 0.5 * bb * s[O];
    let me = mbar(&hs.e)? + s[O] * i1f;
    let mut acc = Acc::default();
    acc.terms(&[
        mbar(&hs.u)?,
        -(s[Y] - s[J]) * i1f,
        0.5 * bb * s[U],
        f * a * mo,
    ]);
    out.push("mbar(U)", acc);
    let mut acc = Acc::default();
    acc.terms(&[mbar(&hs.v)?, -(s[E] - s[J]) * i1f, 0.5 * bb * s[V]]);
    out.push("mbar(V)", acc);
    let mut acc = Acc::default();
    acc.terms(&[
        mbar(&hs.x)?,
        -(s[H] - s[U] - s[V]) * i1f,
        bb * s[X],
        f * a * me,
    ]);
    out.push("mbar(X)", acc);

    let jy = s[J] + s[Y];
    let vh = s[V] + s[H];
    let mut acc = Acc::default();
    acc.terms(&[apply(pd, Frame::lambda, &fr.a_bar)?, ab * jy, -mo]);
    out.push("lambda(Abar)", acc);
    let mut acc = Acc::default();
    acc.terms(&[
        apply(pd, Frame::lambda, &fr.b_bar)?,
        bb / 2.0 * jy,
        -mbar(&hs.y)?,
        -s[O] * i1f,
        -f * b * mo,
    ]);
    out.push("lambda(Bbar)", acc);
    let mut acc = Acc::default();
    acc.terms(&[apply(pd, Frame::mu, &fr.a_bar)?, ab * vh, -me]);
    out.push("mu(Abar)", acc);
    let mut acc = Acc::default();
    acc.terms(&[
        apply(pd, Frame::mu, &fr.b_bar)?,
        bb / 2.0 * vh,
        -mbar(&hs.h)?,
        -(s[Y] + s[E]) * i1f,
        -0.5 * bb * s[H],
        -f * b * me,
    ]);
    out.push("mu(Bbar)", acc);

    // ∂̇_h̄ G^i in its two frame forms
    let spray = geo.spray()?;
    let a0 = f * apply(pd, Frame::lambda, &fr.a_bar)?;
    let mut acc = Acc::default();
    for i in 0..2 {
        for h in 0..2 {
            let lhs = spray.dg_bar[i][h].value();
            let base = w.mu[i] * w.mb[h];
            acc.eq(lhs, f * f / 2.0 * mo * base);
            acc.eq(lhs, f / 2.0 * (a0 + f * ab * jy) * base);
        }
    }
    out.push("dot_hbar G^i in the frame", acc);
    Ok(out)
}

fn holomorphic_frame_derivatives(pd: &PointData) -> std::result::Result<Out, JetError> {
    let fr = &pd.fr;
    let w = Vals::new(pd);
    let (f, a, b) = (w.f, w.a, w.b);
    let s = &w.s;
    let i1f = C::new(1.0, 0.0) / f;
    let hs = &fr.hs;
    let l = |x: &WJet| apply(pd, Frame::l, x);
    let m = |x: &WJet| apply(pd, Frame::m, x);
    let mut out = Out::default();

    let mut acc = Acc::default();
    for (x, c) in [(&hs.u, 0.5), (&hs.x, 1.5), (&hs.y, -0.5), (&hs.h, 0.5)] {
        acc.terms(&[l(x)?, c * x.value() * i1f]);
    }
    out.push("l(U, X, Y, H)", acc);

    let jy = s[J] + s[Y];
    let vh = s[V] + s[H];
    let lam_a = apply(pd, Frame::lambda, &fr.a)?;
    let lam_b = apply(pd, Frame::lambda, &fr.b)?;
    let mu_a = apply(pd, Frame::mu, &fr.a)?;
    let mu_b = apply(pd, Frame::mu, &fr.b)?;
    let mut acc = Acc::default();
    acc.terms(&[
        m(&hs.u)?,
        -a * (s[Y] - s[J]),
        0.5 * b * s[U],
        -s[X] * i1f,
        -lam_a,
        a * jy,
    ]);
    out.push("m(U)", acc);
    let mut acc = Acc::default();
    acc.terms(&[
        m(&hs.y)?,
        a * s[O],
        -(s[H] - s[U]) * i1f,
        -lam_b,
        b / 2.0 * jy,
    ]);
    out.push("m(Y)", acc);
    let mut acc = Acc::default();
    acc.terms(&[m(&hs.x)?, a * (s[U] + s[V] - s[H]), b * s[X], -mu_a, a * vh]);
    out.push("m(X)", acc);
    let mut acc = Acc::default();
    acc.terms(&[
        m(&hs.h)?,
        a * (s[Y] + s[E]),
        s[X] * i1f,
        0.5 * b * s[H],
        -mu_b,
        b / 2.0 * vh,
    ]);
    out.push("m(H)", acc);
    Ok(out)
}

/// The 16 frame coefficients of `R_{r̄jh̄k}`, keyed by the pattern of `l`/`m` in the
/// slots `(r̄, j, h̄, k)`.
pub fn hh_coefficients(pd: &PointData) -> std::result::Result<Vec<(&'static str, C)>, JetError> {
    let (hs, hsb) = (&pd.fr.hs, &pd.fr.hs_bar);
    let w = Vals::new(pd);
    let (f, b, bb) = (w.f, w.b, w.bb);
    let (s, sb) = (&w.s, &w.sb);
    let lam = |x: &WJet| apply(pd, Frame::lambda, x);
    let lamb = |x: &WJet| apply(pd, Frame::lambda_bar, x);
    let mu = |x: &WJet| apply(pd, Frame::mu, x);
    let mub = |x: &WJet| apply(pd, Frame::mu_bar, x);
    let jy = s[J] + s[Y];
    let vh = s[V] + s[H];
    let jyb = sb[J] + sb[Y];
    let vhb = sb[V] + sb[H];
    Ok(vec![
        ("llll", pd.inv.k.value()),
        ("mmmm", pd.inv.w.value()),
        ("lmll", -(lam(&hsb.o)? - 0.5 * sb[O] * jy)),
        ("mlll", -(lamb(&hs.o)? - 0.5 * s[O] * jyb)),
        ("lllm", -mu(&hsb.j)?),
        ("llml", -mub(&hs.j)?),
        ("llmm", -(mub(&hs.v)? + 0.5 * s[V] * vhb)),
        ("mllm", -lam(&hsb.e)?),
        ("lmml", -lamb(&hs.e)?),
        (
            "mmll",
            -(lamb(&hs.y)? + b * f * lamb(&hs.o)? - 0.5 * f * b * s[O] * jyb),
        ),
        ("mlmm", -mub(&hs.e)?),
        (
            "mmml",
            -(lam(&hsb.h)? + 0.5 * sb[H] * jy + bb * f * lam(&hsb.e)?),
        ),
        ("lmmm", -mu(&hsb.e)?),
        (
            "mmlm",
            -(lamb(&hs.h)? + 0.5 * s[H] * jyb + b * f * lamb(&hs.e)?),
        ),
        ("mlml", -(mub(&hs.o)? - 0.5 * s[O] * vhb)),
        ("lmlm", -(mu(&hsb.o)? - 0.5 * sb[O] * vh)),
    ])
}

fn hh_decomposition(pd: &PointData) -> std::result::Result<Out, JetError> {
    let w = Vals::new(pd);
    let coeffs = hh_coefficients(pd)?;
    let mut out = Out::default();
    let mut acc = Acc::default();
    for n in 0..16 {
        let x = unflat(n, 4);
        let mut rebuilt = C::new(0.0, 0.0);
        for (pat, c) in &coeffs {
            let mut t = *c;
            for (slot, ch) in pat.chars().enumerate() {
                let barred = slot % 2 == 0;
                let v = match (ch, barred) {
                    ('l', false) => w.l,
                    ('m', false) => w.m,
                    ('l', true) => w.lb,
                    _ => w.mb,
                };
                t *= v[x[slot]];
            }
            rebuilt += t;
        }
        acc.eq(pd.curv.r.get(&x).value(), rebuilt);
    }
    out.push("R rebuilt from 16 frame terms", acc);
    Ok(out)
}

fn bianchi(pd: &PointData) -> std::result::Result<Out, JetError> {
    let (geo, curv) = (&pd.geo, &pd.curv);
    let mut out = Out::default();
    let cv = |i: usize, j: usize, k: usize| geo.cv[i][j][k].value();
    // R^s̄_{0̄kh̄} = conj(R^s_{0k̄h}), P^s̄_{0̄lh̄} likewise; both indexed [s][k][h]
    let r0 = contract_zero(geo, &curv.r_up);
    let p0 = contract_zero(geo, &curv.p_up);
    let r0b = |s: usize, k: usize, h: usize| r0.get(&[s, k, h]).value().conj();
    let p0b = |s: usize, l: usize, h: usize| p0.get(&[s, l, h]).value().conj();
    let r = |x: [usize; 4]| curv.r.get(&x).value();
    let p = |x: [usize; 4]| curv.p.get(&x).value();
    let s = |x: [usize; 4]| curv.s.get(&x).value();
    let xi = |x: [usize; 4]| curv.xi.get(&x).value();

    let (xi_vbar, xi_vbar_g) = geo.covariant_gross(&curv.xi, Dir::VBar)?;
    let (s_hbar, s_hbar_g) = geo.covariant_gross(&curv.s, Dir::HBar)?;
    out.one("Xi|_sbar - S|hbar + Xi conj(C)", |acc| {
        acc.floor(xi_vbar_g.max(s_hbar_g));
        for n in 0..32 {
            let x = unflat(n, 5);
            let (rr, j, h, k, ss) = (x[0], x[1], x[2], x[3], x[4]);
            let mut t = vec![
                xi_vbar.get(&x).value(),
                -s_hbar.get(&[rr, j, ss, k, h]).value(),
            ];
            for q in 0..2 {
                t.push(xi([rr, j, q, k]) * cv(q, ss, h).conj());
            }
            acc.terms(&t);
        }
    });

    let (r_v, r_v_g) = geo.covariant_gross(&curv.r, Dir::V)?;
    let (xi_h, xi_h_g) = geo.covariant_gross(&curv.xi, Dir::H)?;
    out.one("R|_l - Xi|k - P P + S R + R C", |acc| {
        acc.floor(r_v_g.max(xi_h_g));
        for n in 0..32 {
            let x = unflat(n, 5);
            let (rr, j, h, k, l) = (x[0], x[1], x[2], x[3], x[4]);
            let mut t = vec![r_v.get(&x).value(), -xi_h.get(&[rr, j, h, l, k]).value()];
            for q in 0..2 {
                t.push(-p([rr, j, q, k]) * p0b(q, l, h));
                t.push(s([rr, j, q, l]) * r0b(q, k, h));
                t.push(r([rr, j, h, q]) * cv(q, k, l));
            }
            acc.terms(&t);
        }
    });

    let (r_h, r_h_g) = geo.covariant_gross(&curv.r, Dir::H)?;
    let tor = geo.torsion();
    out.one("antisymmetrized R|l - P R + R T", |acc| {
        acc.floor(r_h_g);
        for n in 0..32 {
            let x = unflat(n, 5);
            let (rr, j, h, k, l) = (x[0], x[1], x[2], x[3], x[4]);
            let mut t = vec![
                r_h.get(&[rr, j, h, k, l]).value(),
                -r_h.get(&[rr, j, h, l, k]).value(),
            ];
            for q in 0..2 {
                t.push(-p([rr, j, q, k]) * r0b(q, l, h));
                t.push(p([rr, j, q, l]) * r0b(q, k, h));
                t.push(r([rr, j, h, q]) * tor.t[q][k][l].value());
            }
            acc.terms(&t);
        }
    });

    let (s_v, s_v_g) = geo.covariant_gross(&curv.s, Dir::V)?;
    out.one("S|_i symmetric in (k, i)", |acc| {
        acc.floor(s_v_g);
        for n in 0..32 {
            let x = unflat(n, 5);
            let (rr, j, h, k, i) = (x[0], x[1], x[2], x[3], x[4]);
            acc.eq(s_v.get(&x).value(), s_v.get(&[rr, j, h, i, k]).value());
        }
    });
    Ok(out)
}

fn invariant_derivatives(pd: &PointData) -> std::result::Result<Out, JetError> {
    let (geo, fr, curv, inv) = (&pd.geo, &pd.fr, &pd.curv, &pd.inv);
    let w = Vals::new(pd);
    let i0 = inv.i.value();
    let mut out = Out::default();
    out.one("S = I mbar m mbar m", |acc| {
        for n in 0..16 {
            let x = unflat(n, 4);
            let (r, j, h, k) = (x[0], x[1], x[2], x[3]);
            acc.eq(
                curv.s.get(&x).value(),
                i0 * w.mb[h] * w.mb[r] * w.m[j] * w.m[k],
            );
        }
    });
    let (l, m) = (&fr.l_up, &fr.m_up);
    out.one("K^v_l = 0", |acc| {
        acc.terms(&[four_contract(&curv.s, l, l, l, l).value() * 2.0]);
    });
    out.one("K^v_m = 2I", |acc| {
        acc.eq(four_contract(&curv.s, m, m, m, m).value() * 2.0, i0 * 2.0);
    });
    out.one("I real", |acc| {
        acc.terms(&[C::new(0.0, i0.im)]);
    });
    let mut acc = Acc::default();
    let eta = v2(&geo.eta);
    let i_eta = geo.vdot(&inv.i, 0)?.value() * eta[0] + geo.vdot(&inv.i, 1)?.value() * eta[1];
    acc.terms(&[i_eta, i0]);
    out.push("I|_0 = -I", acc);
    let mut acc = Acc::default();
    acc.eq(apply(pd, Frame::m_bar, &fr.a)?, -w.a * w.bb + w.b / w.f);
    out.push("A|_sbar m^sbar = -A Bbar + B/F", acc);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(name: &str, p: Point, order: usize) -> (MetricSpec, PointData) {
        let m = MetricSpec::builtin(name, &[]).unwrap();
        let pd = PointData::new(&m, &p, order).unwrap();
        (m, pd)
    }

    fn hartogs_point() -> Point {
        Point::from_parts((0.5, 0.1), (0.1, -0.05), (1.0, 0.2), (0.4, -0.3))
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
        assert_eq!(Suite::from_name("nope"), None);
    }

    #[test]
    fn euclidean_all_suites_vanish() {
        let p = Point::from_parts((0.1, 0.2), (-0.3, 0.0), (0.7, 0.1), (0.2, -0.4));
        let (m, pd) = data("euclidean", p, 6);
        for r in run_suites(&Suite::ALL, &m, &pd).unwrap() {
            assert!(r.max_residual() < 1e-12, "{:?}", r);
        }
    }

    #[test]
    fn all_builtins_all_suites() {
        for b in crate::metric::BUILTINS {
            let m = MetricSpec::builtin(b.name, &[]).unwrap();
            for p in crate::sampling::sample_points(&m, 3, 11).unwrap() {
                let pd = PointData::new(&m, &p, 6).unwrap();
                for r in run_suites(&Suite::ALL, &m, &pd).unwrap() {
                    let w = r.worst().unwrap();
                    assert!(
                        w.residual < 1e-7,
                        "{} {} {}: {:.3e}",
                        b.name,
                        r.suite.name(),
                        w.name,
                        w.residual
                    );
                }
            }
        }
    }

    #[test]
    fn order_budget_is_reported() {
        let (m, pd) = data("euclidean", hartogs_point(), 5);
        assert!(matches!(
            run_suite(Suite::Bianchi, &m, &pd),
            Err(crate::Error::Jet(JetError::OrderBudget { .. }))
        ));
    }
}
