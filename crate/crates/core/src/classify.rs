//! Per-point and sampled classification of a metric: purely Hermitian, (weakly)
//! Kähler, Berwald, Landsberg, G-Landsberg, weak symmetry, the `A`/`B` trichotomy and
//! the constant-curvature special form.
//!
//! Every flag carries a relative residual `|difference| / max(1, scale)` where the scale
//! is the largest magnitude among the compared quantities, including the summands that
//! built them. Verdicts are three-valued: `yes` at or below the tolerance, `no` at or
//! above `fail_margin` times the tolerance, `indeterminate` in between.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{four_contract, SpecialFormFit};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::geometry::{Geometry, Vec2, T3};
use crate::identities::PointData;
use crate::jet::{JetError, WJet};
use crate::metric::MetricSpec;
use crate::point::Point;
use crate::sampling::sample_points;
use crate::tensor::{Dir, JetTensor};

type C = Complex64;

/// Lowest jet order at which every classification quantity has a value.
pub const MIN_ORDER: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    PurelyHermitian,
    WeaklyKahler,
    Kahler,
    HolomorphicSpray,
    Berwald,
    Landsberg,
    GLandsberg,
    WeakSymmetry,
    /// `R_{r̄jh̄k}`, `K`, `W` all vanish, as for a locally Minkowski space.
    HorizontallyFlat,
}

impl Flag {
    pub const ALL: [Flag; 9] = [
        Flag::PurelyHermitian,
        Flag::WeaklyKahler,
        Flag::Kahler,
        Flag::HolomorphicSpray,
        Flag::Berwald,
        Flag::Landsberg,
        Flag::GLandsberg,
        Flag::WeakSymmetry,
        Flag::HorizontallyFlat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Flag::PurelyHermitian => "purely_hermitian",
            Flag::WeaklyKahler => "weakly_kahler",
            Flag::Kahler => "kahler",
            Flag::HolomorphicSpray => "holomorphic_spray",
            Flag::Berwald => "berwald",
            Flag::Landsberg => "landsberg",
            Flag::GLandsberg => "g_landsberg",
            Flag::WeakSymmetry => "weak_symmetry",
            Flag::HorizontallyFlat => "horizontally_flat",
        }
    }

    pub fn from_name(s: &str) -> Option<Flag> {
        Flag::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Indeterminate,
}

impl Verdict {
    /// Three-valued conjunction.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::No, _) | (_, Verdict::No) => Verdict::No,
            (Verdict::Yes, Verdict::Yes) => Verdict::Yes,
            _ => Verdict::Indeterminate,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub pass_tol: f64,
    pub fail_margin: f64,
    /// Per-flag replacements for `pass_tol`.
    #[serde(default)]
    pub overrides: BTreeMap<Flag, f64>,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            pass_tol: 1e-8,
            fail_margin: 10.0,
            overrides: BTreeMap::new(),
        }
    }
}

impl ToleranceConfig {
    pub fn with_tol(pass_tol: f64) -> Self {
        ToleranceConfig {
            pass_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |t: f64| t > 0.0 && t.is_finite();
        if !ok(self.pass_tol) || self.overrides.values().any(|&t| !ok(t)) {
            return Err(Error::BadParam(format!(
                "tolerance must be positive, got {}",
                self.pass_tol
            )));
        }
        if !(self.fail_margin > 1.0) {
            return Err(Error::BadParam(format!(
                "fail margin must exceed 1, got {}",
                self.fail_margin
            )));
        }
        Ok(())
    }

    pub fn tol(&self, flag: Option<Flag>) -> f64 {
        flag.and_then(|f| self.overrides.get(&f).copied())
            .unwrap_or(self.pass_tol)
    }

    /// NaN residuals are indeterminate.
    pub fn verdict(&self, flag: Option<Flag>, residual: f64) -> Verdict {
        let t = self.tol(flag);
        if residual <= t {
            Verdict::Yes
        } else if residual >= self.fail_margin * t {
            Verdict::No
        } else {
            Verdict::Indeterminate
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagResult {
    pub verdict: Verdict,
    pub residual: f64,
    /// Named magnitudes behind the residual.
    pub witness: BTreeMap<String, f64>,
}

impl FlagResult {
    fn conjunction(parts: &[&FlagResult]) -> FlagResult {
        let mut witness = BTreeMap::new();
        let mut residual: f64 = 0.0;
        let mut verdict = Verdict::Yes;
        for p in parts {
            verdict = verdict.and(p.verdict);
            residual = nan_max(residual, p.residual);
            witness.extend(p.witness.iter().map(|(k, v)| (k.clone(), *v)));
        }
        FlagResult {
            verdict,
            residual,
            witness,
        }
    }
}

/// Branch of the `A`/`B` trichotomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `A = 0`
    PurelyHermitian,
    /// `|A| ≠ 0`, `B = 0`, with the first-order conditions on `J+Y`, `V+H`.
    BZero,
    /// `AB² ≠ 0` with the conditions on `(J+Y)|_0`, `(V+H)|_0` and `B_{|k}`.
    Generic,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trichotomy {
    pub branch: Branch,
    pub abs_a: f64,
    pub abs_b: f64,
    /// `|B| / max(1, |A|)`
    pub b_relative: f64,
    pub b_zero_conditions: f64,
    pub generic_conditions: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialForm {
    pub k_fit: C,
    pub residual: f64,
    pub verdict: Verdict,
    /// Largest vertical derivative of the fitted coefficient.
    pub vertical_variation: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantValues {
    pub i: C,
    pub k: C,
    pub w: C,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointClassification {
    pub point: Point,
    pub flags: BTreeMap<Flag, FlagResult>,
    pub trichotomy: Trichotomy,
    pub special_form: SpecialForm,
    pub invariants: InvariantValues,
    /// Relative size of `I_{|k}`.
    pub i_horizontal: f64,
    /// `A_{|0̄} + A F (J̄ + Ȳ)`
    pub phi: C,
    /// `A_{|k̄} m^k̄ + A (V̄ + H̄)`
    pub omega: C,
    /// Broken implications between flags; empty on a consistent point.
    pub violations: Vec<String>,
}

impl PointClassification {
    pub fn flag(&self, f: Flag) -> &FlagResult {
        &self.flags[&f]
    }

    pub fn verdict(&self, f: Flag) -> Verdict {
        self.flags[&f].verdict
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// `Σ c_i a^j b^k T^i_{jk}` and its largest summand.
fn contract_gross(a: &Vec2, b: &Vec2, c: &Vec2, t: &T3) -> (C, f64) {
    let mut s = C::new(0.0, 0.0);
    let mut gross: f64 = 0.0;
    for n in 0..8 {
        let (i, j, k) = (n >> 2, (n >> 1) & 1, n & 1);
        let x = c[i].value() * a[j].value() * b[k].value() * t[i][j][k].value();
        gross = gross.max(x.norm());
        s += x;
    }
    (s, gross)
}

/// `δ_k x` at the base point, and the largest summand.
fn delta_gross(geo: &Geometry, x: &WJet) -> std::result::Result<([C; 2], f64), JetError> {
    let (t, gross) = geo.covariant_gross(&JetTensor::scalar(x.clone()), Dir::H)?;
    Ok(([t.comps[0].value(), t.comps[1].value()], gross))
}

fn delta_bar_gross(geo: &Geometry, x: &WJet) -> std::result::Result<([C; 2], f64), JetError> {
    let (t, gross) = geo.covariant_gross(&JetTensor::scalar(x.clone()), Dir::HBar)?;
    Ok(([t.comps[0].value(), t.comps[1].value()], gross))
}

fn dot(a: [C; 2], b: [C; 2]) -> C {
    a[0] * b[0] + a[1] * b[1]
}

/// Relative residual of `Σ terms = 0`, with extra gross magnitudes folded into the scale.
fn rel(terms: &[C], gross: f64) -> (f64, f64) {
    let s: C = terms.iter().sum();
    let scale = terms.iter().map(|t| t.norm()).fold(gross, f64::max);
    (s.norm() / scale.max(1.0), scale)
}

fn witness(items: &[(&str, f64)]) -> BTreeMap<String, f64> {
    items.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

struct Ctx<'a> {
    tol: &'a ToleranceConfig,
}

impl Ctx<'_> {
    fn result(&self, flag: Flag, residual: f64, w: &[(&str, f64)]) -> FlagResult {
        FlagResult {
            verdict: self.tol.verdict(Some(flag), residual),
            residual,
            witness: witness(w),
        }
    }
}

/// Classifies one point of `spec`. Needs jets of order at least [`MIN_ORDER`].
pub fn classify_point(
    spec: &MetricSpec,
    point: &Point,
    order: usize,
    tol: &ToleranceConfig,
) -> Result<PointClassification> {
    tol.validate()?;
    if order < MIN_ORDER {
        return Err(JetError::OrderBudget {
            quantity: "classification".into(),
            needed: MIN_ORDER,
            available: order,
        }
        .into());
    }
    spec.check_domain(point)?;
    let pd = PointData::new(spec, point, order)?;
    classify_data(&pd, tol)
}

/// Classifies precomputed point data.
pub fn classify_data(pd: &PointData, tol: &ToleranceConfig) -> Result<PointClassification> {
    let order = pd.geo.order();
    if order < MIN_ORDER {
        return Err(JetError::OrderBudget {
            quantity: "classification".into(),
            needed: MIN_ORDER,
            available: order,
        }
        .into());
    }
    let cx = Ctx { tol };
    let (geo, fr) = (&pd.geo, &pd.fr);
    let f = geo.fin.value();
    let (a, b) = (fr.a.value(), fr.b.value());
    let s = fr.hs.as_array().map(WJet::value);
    let [sj, su, sv, _sx, _so, sy, se, sh] = s;
    let jy = sj + sy;
    let vh = sv + sh;
    let mut flags = BTreeMap::new();

    let max_c = geo
        .cv
        .iter()
        .flatten()
        .flatten()
        .map(|x| x.value().norm())
        .fold(0.0, nan_max);
    let ph = cx.result(
        Flag::PurelyHermitian,
        nan_max(max_c, a.norm()),
        &[("max_abs_C", max_c), ("abs_A", a.norm())],
    );

    // frame scalars are contractions of L; their summands set the scale
    let (l, m, ld, md) = (&fr.l_up, &fr.m_up, &fr.l_dn, &fr.m_dn);
    let gross_u = contract_gross(m, l, ld, &geo.lh).1;
    let gross_v = contract_gross(l, m, ld, &geo.lh).1;
    let gross_y = contract_gross(m, l, md, &geo.lh).1;
    let gross_e = contract_gross(l, m, md, &geo.lh).1;
    let (r_uv, sc_uv) = rel(&[su, -sv], gross_u.max(gross_v));
    let (r_ye, sc_ye) = rel(&[sy, -se], gross_y.max(gross_e));
    let wk = cx.result(
        Flag::WeaklyKahler,
        r_uv,
        &[("abs_U_minus_V", (su - sv).norm()), ("scale_UV", sc_uv)],
    );
    let kahler_alone = cx.result(
        Flag::Kahler,
        nan_max(r_uv, r_ye),
        &[
            ("abs_U_minus_V", (su - sv).norm()),
            ("abs_Y_minus_E", (sy - se).norm()),
            ("scale_UV", sc_uv),
            ("scale_YE", sc_ye),
        ],
    );

    let spray = geo.spray()?;
    let max_dg = spray
        .dg_bar
        .iter()
        .flatten()
        .map(|x| x.value().norm())
        .fold(0.0, nan_max);
    let max_nc = spray
        .nc
        .iter()
        .flatten()
        .map(|x| x.value().norm())
        .fold(0.0, f64::max);
    let holo_res = max_dg / max_dg.max(max_nc).max(1.0);
    // the same quantity in frame form: Ā_{|0} + F Ā (J+Y)
    let (d_ab, g_ab) = delta_gross(geo, &fr.a_bar)?;
    let eta = [geo.eta[0].value(), geo.eta[1].value()];
    let eta_n = eta[0].norm().max(eta[1].norm());
    let ab0 = dot(eta, d_ab);
    let ab = fr.a_bar.value();
    let (lemma_res, _) = rel(&[ab0, f * ab * jy], g_ab * eta_n);
    let holo = cx.result(
        Flag::HolomorphicSpray,
        holo_res,
        &[
            ("max_abs_dG_bar", max_dg),
            ("max_abs_dG", max_nc),
            ("frame_form", lemma_res),
        ],
    );

    let kahler = FlagResult::conjunction(&[&kahler_alone]);
    let berwald = FlagResult::conjunction(&[&kahler_alone, &holo]);

    let (d_a, g_a) = delta_gross(geo, &fr.a)?;
    let (d_b, g_b) = delta_gross(geo, &fr.b)?;
    let a0 = dot(eta, d_a);
    let b0 = dot(eta, d_b);
    let (r1, _) = rel(
        &[f * a * se, -f * a * sy, -a0, f * a * sj, f * a * sy],
        g_a * eta_n,
    );
    let (r2, _) = rel(
        &[
            f * b * se,
            -f * b * sy,
            -b0,
            0.5 * f * b * sj,
            0.5 * f * b * sy,
        ],
        g_b * eta_n,
    );
    let lands = cx.result(
        Flag::Landsberg,
        nan_max(r1, r2),
        &[("A_equation", r1), ("B_equation", r2)],
    );
    let g_lands = FlagResult::conjunction(&[&lands, &holo]);

    let eta_v = geo.eta.clone();
    let eta_b = geo.eta_bar.clone();
    let mut ws_res: f64 = 0.0;
    let mut ws_diff: f64 = 0.0;
    for k in 0..2 {
        let mut unit = [WJet::zero(order), WJet::zero(order)];
        unit[k] = geo.ctx.constant(C::new(1.0, 0.0));
        let lhs = four_contract(&pd.curv.r, &eta_b, &unit, &eta_b, &eta_v).value();
        let rhs = four_contract(&pd.curv.r, &eta_b, &eta_v, &eta_b, &unit).value();
        ws_diff = nan_max(ws_diff, (lhs - rhs).norm());
        ws_res = nan_max(ws_res, rel(&[lhs, -rhs], 0.0).0);
    }
    let ws = cx.result(Flag::WeakSymmetry, ws_res, &[("abs_difference", ws_diff)]);

    let max_r = pd.curv.r.max_abs_value();
    let (iv, kv, wv) = (pd.inv.i.value(), pd.inv.k.value(), pd.inv.w.value());
    let flat = cx.result(
        Flag::HorizontallyFlat,
        max_r.max(kv.norm()).max(wv.norm()),
        &[
            ("max_abs_R", max_r),
            ("abs_K", kv.norm()),
            ("abs_W", wv.norm()),
        ],
    );

    // trichotomy
    let b_rel = b.norm() / a.norm().max(1.0);
    let b_zero = tol.verdict(None, b_rel);
    let op = |o: fn(&Frame, &Geometry, &WJet) -> std::result::Result<WJet, JetError>, x: &WJet| {
        o(fr, geo, x).map(|y| y.value())
    };
    let jy_j = fr.hs.jy();
    let vh_j = fr.hs.vh();
    let m_jy = op(Frame::m, &jy_j)?;
    let m_vh = op(Frame::m, &vh_j)?;
    let c2 = nan_max(rel(&[m_jy, -vh / f], 0.0).0, rel(&[m_vh, a * jy], 0.0).0);
    let l_jy = f * op(Frame::l, &jy_j)?;
    let l_vh = f * op(Frame::l, &vh_j)?;
    let coef_l = 0.5 * b * jy + m_jy - vh / f;
    let coef_m = b * vh + m_vh + a * jy;
    let (ldv, mdv) = (
        [ld[0].value(), ld[1].value()],
        [md[0].value(), md[1].value()],
    );
    let mut c3 = nan_max(
        rel(&[l_jy, -0.5 * jy], 0.0).0,
        rel(&[l_vh, 0.5 * vh], 0.0).0,
    );
    for k in 0..2 {
        let terms = [d_b[k], -coef_l * ldv[k], -coef_m * mdv[k]];
        c3 = nan_max(c3, rel(&terms, g_b).0);
    }
    let cond = |r: f64| tol.verdict(None, r);
    let branch = match (ph.verdict, b_zero) {
        (Verdict::Yes, _) => Branch::PurelyHermitian,
        (Verdict::No, Verdict::Yes) if cond(c2) == Verdict::Yes => Branch::BZero,
        (Verdict::No, Verdict::No) if cond(c3) == Verdict::Yes => Branch::Generic,
        _ => Branch::Indeterminate,
    };
    let trichotomy = Trichotomy {
        branch,
        abs_a: a.norm(),
        abs_b: b.norm(),
        b_relative: b_rel,
        b_zero_conditions: c2,
        generic_conditions: c3,
    };

    let fit = SpecialFormFit::new(geo, &pd.curv)?;
    let special_form = SpecialForm {
        k_fit: fit.kfit.value(),
        residual: fit.residual,
        verdict: tol.verdict(None, fit.residual),
        vertical_variation: fit.vertical_variation(geo),
    };

    let (d_i, g_i) = delta_gross(geo, &pd.inv.i)?;
    let i_horizontal = nan_max(d_i[0].norm(), d_i[1].norm()) / g_i.max(1.0);

    let eta_bv = [eta[0].conj(), eta[1].conj()];
    let (db_a, _) = delta_bar_gross(geo, &fr.a)?;
    let sb = &fr.hs_bar;
    let phi = dot(eta_bv, db_a) + a * f * (sb.j.value() + sb.y.value());
    let mbar = [fr.m_up_bar[0].value(), fr.m_up_bar[1].value()];
    let omega = dot(mbar, db_a) + a * (sb.v.value() + sb.h.value());

    let mut violations = Vec::new();
    let mut imply = |p: (&str, Verdict), q: (&str, Verdict)| {
        if p.1 == Verdict::Yes && q.1 == Verdict::No {
            violations.push(format!("{} without {}", p.0, q.0));
        }
    };
    imply(("berwald", berwald.verdict), ("kahler", kahler.verdict));
    imply(("kahler", kahler.verdict), ("weakly_kahler", wk.verdict));
    imply(
        ("kahler", kahler.verdict),
        ("holomorphic_spray", holo.verdict),
    );
    imply(("kahler", kahler.verdict), ("landsberg", lands.verdict));
    imply(
        ("berwald", berwald.verdict),
        ("g_landsberg", g_lands.verdict),
    );
    imply(
        ("g_landsberg", g_lands.verdict),
        ("landsberg", lands.verdict),
    );
    imply(("purely_hermitian", ph.verdict), ("B = 0", b_zero));
    imply(
        ("weakly_kahler with B = 0", wk.verdict.and(b_zero)),
        ("landsberg", lands.verdict),
    );
    let lemma = tol.verdict(Some(Flag::HolomorphicSpray), lemma_res);
    imply(
        ("holomorphic_spray", holo.verdict),
        ("its frame form", lemma),
    );
    imply(
        ("frame form of holomorphic_spray", lemma),
        ("holomorphic_spray", holo.verdict),
    );

    flags.insert(Flag::PurelyHermitian, ph);
    flags.insert(Flag::WeaklyKahler, wk);
    flags.insert(Flag::Kahler, kahler);
    flags.insert(Flag::HolomorphicSpray, holo);
    flags.insert(Flag::Berwald, berwald);
    flags.insert(Flag::Landsberg, lands);
    flags.insert(Flag::GLandsberg, g_lands);
    flags.insert(Flag::WeakSymmetry, ws);
    flags.insert(Flag::HorizontallyFlat, flat);

    Ok(PointClassification {
        point: *geo.point(),
        flags,
        trichotomy,
        special_form,
        invariants: InvariantValues {
            i: iv,
            k: kv,
            w: wv,
        },
        i_horizontal,
        phi,
        omega,
        violations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Consensus {
    Unanimous,
    Majority,
    Split,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagSummary {
    pub yes: usize,
    pub no: usize,
    pub indeterminate: usize,
    pub fraction_yes: f64,
    pub consensus: Consensus,
    /// The unanimous or majority verdict; `indeterminate` on a split.
    pub verdict: Verdict,
    pub worst_residual: f64,
}

impl FlagSummary {
    fn from_verdicts(vs: &[(Verdict, f64)]) -> FlagSummary {
        let count = |v: Verdict| vs.iter().filter(|x| x.0 == v).count();
        let (yes, no, ind) = (
            count(Verdict::Yes),
            count(Verdict::No),
            count(Verdict::Indeterminate),
        );
        let n = vs.len();
        let (best, top) = [
            (Verdict::Yes, yes),
            (Verdict::No, no),
            (Verdict::Indeterminate, ind),
        ]
        .into_iter()
        .max_by_key(|x| x.1)
        .unwrap_or((Verdict::Indeterminate, 0));
        let (consensus, verdict) = if n > 0 && top == n {
            (Consensus::Unanimous, best)
        } else if 2 * top > n {
            (Consensus::Majority, best)
        } else {
            (Consensus::Split, Verdict::Indeterminate)
        };
        FlagSummary {
            yes,
            no,
            indeterminate: ind,
            fraction_yes: if n == 0 { 0.0 } else { yes as f64 / n as f64 },
            consensus,
            verdict,
            worst_residual: vs.iter().map(|x| x.1).fold(0.0, nan_max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub points: usize,
    pub flags: BTreeMap<Flag, FlagSummary>,
    pub special_form: FlagSummary,
    pub branches: BTreeMap<Branch, usize>,
    pub worst_i_horizontal: f64,
    /// Points with at least one broken implication.
    pub inconsistent_points: usize,
}

/// Folds per-point results; the output depends only on their order.
pub fn summarize(points: &[PointClassification]) -> Aggregate {
    let flags = Flag::ALL
        .into_iter()
        .map(|f| {
            let vs: Vec<_> = points
                .iter()
                .map(|p| (p.verdict(f), p.flag(f).residual))
                .collect();
            (f, FlagSummary::from_verdicts(&vs))
        })
        .collect();
    let sf: Vec<_> = points
        .iter()
        .map(|p| (p.special_form.verdict, p.special_form.residual))
        .collect();
    let mut branches = BTreeMap::new();
    for p in points {
        *branches.entry(p.trichotomy.branch).or_insert(0) += 1;
    }
    Aggregate {
        points: points.len(),
        flags,
        special_form: FlagSummary::from_verdicts(&sf),
        branches,
        worst_i_horizontal: points.iter().map(|p| p.i_horizontal).fold(0.0, nan_max),
        inconsistent_points: points.iter().filter(|p| !p.violations.is_empty()).count(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema_version: u32,
    pub metric: String,
    pub order: usize,
    pub seed: Option<u64>,
    pub tolerance: ToleranceConfig,
    pub points: Vec<PointClassification>,
    pub aggregate: Aggregate,
}

/// Classifies `points` in parallel; results keep the input order. The first failing
/// point (by index) aborts the run.
pub fn classify_points(
    spec: &MetricSpec,
    points: &[Point],
    order: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<PointClassification>> {
    points
        .par_iter()
        .map(|p| classify_point(spec, p, order, tol))
        .collect()
}

/// Seeded sampling followed by per-point classification and aggregation.
pub fn aggregate(
    spec: &MetricSpec,
    count: usize,
    seed: u64,
    order: usize,
    tol: &ToleranceConfig,
) -> Result<ClassificationReport> {
    tol.validate()?;
    let pts = sample_points(spec, count, seed)?;
    let points = classify_points(spec, &pts, order, tol)?;
    Ok(ClassificationReport::new(
        spec,
        order,
        Some(seed),
        tol,
        points,
    ))
}

impl ClassificationReport {
    pub fn new(
        spec: &MetricSpec,
        order: usize,
        seed: Option<u64>,
        tol: &ToleranceConfig,
        points: Vec<PointClassification>,
    ) -> ClassificationReport {
        ClassificationReport {
            schema_version: crate::report::SCHEMA_VERSION,
            metric: spec.name.clone(),
            order,
            seed,
            tolerance: tol.clone(),
            aggregate: summarize(&points),
            points,
        }
    }
}

/// Relative changes of `I`, `K`, `W` under the constant linear change `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceResidual {
    pub i: f64,
    pub k: f64,
    pub w: f64,
}

impl InvarianceResidual {
    pub fn max(&self) -> f64 {
        nan_max(nan_max(self.i, self.k), self.w)
    }
}

/// Compares `I`, `K`, `W` of `spec` at `point` with those of the pulled-back metric
/// `L(M⁻¹z', M⁻¹η')` at `(Mz, Mη)`.
pub fn linear_change_invariance(
    spec: &MetricSpec,
    point: &Point,
    m: [[C; 2]; 2],
    order: usize,
) -> Result<InvarianceResidual> {
    spec.check_domain(point)?;
    let before = PointData::new(spec, point, order)?.inv;
    let after = PointData::from_geometry(Geometry::linear_pullback(spec, point, m, order)?)?.inv;
    let r = |x: &WJet, y: &WJet| {
        let (a, b) = (x.value(), y.value());
        (a - b).norm() / a.norm().max(b.norm()).max(1.0)
    };
    Ok(InvarianceResidual {
        i: r(&before.i, &after.i),
        k: r(&before.k, &after.k),
        w: r(&before.w, &after.w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hartogs_point() -> Point {
        Point::from_parts((0.5, 0.1), (0.1, -0.05), (1.0, 0.2), (0.4, -0.3))
    }

    fn classify(name: &str, params: &[(&str, &str)], p: Point) -> PointClassification {
        let params: Vec<_> = params
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let m = MetricSpec::builtin(name, &params).unwrap();
        classify_point(&m, &p, 6, &ToleranceConfig::default()).unwrap()
    }

    #[test]
    fn verdict_band() {
        let t = ToleranceConfig::default();
        assert_eq!(t.verdict(None, 1e-9), Verdict::Yes);
        assert_eq!(t.verdict(None, 5e-8), Verdict::Indeterminate);
        assert_eq!(t.verdict(None, 1e-7), Verdict::No);
        assert_eq!(t.verdict(None, f64::NAN), Verdict::Indeterminate);
        let mut o = ToleranceConfig::default();
        o.overrides.insert(Flag::Kahler, 1e-3);
        assert_eq!(o.verdict(Some(Flag::Kahler), 1e-5), Verdict::Yes);
        assert!(ToleranceConfig::with_tol(0.0).validate().is_err());
        assert!(ToleranceConfig {
            fail_margin: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn euclidean_every_flag_yes() {
        let c = classify("euclidean", &[], hartogs_point());
        for f in Flag::ALL {
            assert_eq!(c.verdict(f), Verdict::Yes, "{f:?}");
        }
        assert_eq!(c.special_form.k_fit, C::new(0.0, 0.0));
        assert_eq!(c.trichotomy.branch, Branch::PurelyHermitian);
        assert!(c.violations.is_empty());
    }

    #[test]
    fn hartogs_randers_is_berwald() {
        let c = classify("hartogs-randers", &[], hartogs_point());
        assert_eq!(c.verdict(Flag::PurelyHermitian), Verdict::No);
        for f in [
            Flag::Kahler,
            Flag::HolomorphicSpray,
            Flag::Berwald,
            Flag::Landsberg,
            Flag::GLandsberg,
        ] {
            assert_eq!(c.verdict(f), Verdict::Yes, "{f:?} {:?}", c.flag(f));
        }
        assert!(c.violations.is_empty(), "{:?}", c.violations);
    }

    #[test]
    fn antonelli_shimada_not_berwald() {
        let p = Point::from_parts((0.5, 0.1), (0.1, -0.05), (1.0, 0.2), (0.4, -0.3));
        let c = classify("antonelli-shimada", &[("sigma", "hartogs-log")], p);
        assert_eq!(c.verdict(Flag::Kahler), Verdict::No);
        assert_eq!(c.verdict(Flag::Berwald), Verdict::No);
        assert!(c.i_horizontal < 1e-8, "{}", c.i_horizontal);
        assert!(c.violations.is_empty(), "{:?}", c.violations);
    }

    #[test]
    fn order_too_low() {
        let m = MetricSpec::builtin("euclidean", &[]).unwrap();
        let e = classify_point(&m, &hartogs_point(), 4, &ToleranceConfig::default()).unwrap_err();
        assert!(matches!(e, Error::Jet(JetError::OrderBudget { .. })));
    }

    #[test]
    fn aggregate_is_deterministic() {
        let m = MetricSpec::builtin("hartogs-kropina", &[]).unwrap();
        let t = ToleranceConfig::default();
        let a = aggregate(&m, 6, 5, 6, &t).unwrap();
        let b = aggregate(&m, 6, 5, 6, &t).unwrap();
        assert_eq!(a, b);
        let s = &a.aggregate.flags[&Flag::Berwald];
        assert_eq!(
            (s.consensus, s.verdict),
            (Consensus::Unanimous, Verdict::Yes)
        );
    }

    #[test]
    fn consensus_kinds() {
        let y = (Verdict::Yes, 0.0);
        let n = (Verdict::No, 1.0);
        let s = FlagSummary::from_verdicts(&[y, y, n]);
        assert_eq!(
            (s.consensus, s.verdict, s.fraction_yes),
            (Consensus::Majority, Verdict::Yes, 2.0 / 3.0)
        );
        let s = FlagSummary::from_verdicts(&[y, n]);
        assert_eq!(
            (s.consensus, s.verdict),
            (Consensus::Split, Verdict::Indeterminate)
        );
        assert_eq!(s.worst_residual, 1.0);
    }

    #[test]
    fn identity_change_is_exact() {
        let m = MetricSpec::builtin("hartogs-randers", &[]).unwrap();
        let one = C::new(1.0, 0.0);
        let zero = C::new(0.0, 0.0);
        let r =
            linear_change_invariance(&m, &hartogs_point(), [[one, zero], [zero, one]], 5).unwrap();
        assert!(r.max() < 1e-14, "{r:?}");
    }
}
