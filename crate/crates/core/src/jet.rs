//! Truncated multivariate power series in the eight Wirtinger variables
//! `(z1, z2, e1, e2, z1̄, z2̄, e1̄, e2̄)` around a base point.
//!
//! Coefficients are stored densely in a graded order: every monomial of
//! total degree `d` precedes every monomial of degree `d + 1`. A jet of
//! order `n` is therefore a prefix of a jet of any higher order, which makes
//! truncation free and lets one product table serve all orders.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::point::Point;

pub const NVARS: usize = 8;
pub const MAX_ORDER: usize = 10;
pub const DEFAULT_ORDER: usize = 6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One of the eight independent Wirtinger variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Z(usize),
    Eta(usize),
    ZBar(usize),
    EtaBar(usize),
}

impl Var {
    pub fn index(self) -> usize {
        match self {
            Var::Z(i) => i,
            Var::Eta(i) => 2 + i,
            Var::ZBar(i) => 4 + i,
            Var::EtaBar(i) => 6 + i,
        }
    }

    pub fn from_index(k: usize) -> Var {
        match k {
            0 | 1 => Var::Z(k),
            2 | 3 => Var::Eta(k - 2),
            4 | 5 => Var::ZBar(k - 4),
            6 | 7 => Var::EtaBar(k - 6),
            _ => panic!("variable index {k} out of range"),
        }
    }

    pub fn bar(self) -> Var {
        match self {
            Var::Z(i) => Var::ZBar(i),
            Var::Eta(i) => Var::EtaBar(i),
            Var::ZBar(i) => Var::Z(i),
            Var::EtaBar(i) => Var::Eta(i),
        }
    }

    pub fn name(self) -> String {
        match self {
            Var::Z(i) => format!("z{}", i + 1),
            Var::Eta(i) => format!("e{}", i + 1),
            Var::ZBar(i) => format!("conj(z{})", i + 1),
            Var::EtaBar(i) => format!("conj(e{})", i + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JetError {
    #[error("order budget exceeded for {quantity}: needs order {needed}, have {available}")]
    OrderBudget {
        quantity: String,
        needed: usize,
        available: usize,
    },
    #[error("division by a jet whose constant term is zero")]
    ZeroDivisor,
    #[error("{func} needs a real-positive constant term, got {value}")]
    Branch {
        func: &'static str,
        value: Complex64,
    },
    #[error("jet order {0} outside 2..={MAX_ORDER}")]
    InvalidOrder(usize),
    #[error("fiber coordinate eta must be nonzero")]
    ZeroEta,
}

impl JetError {
    /// Re-labels an order-budget error with the quantity that triggered it.
    pub fn named(self, quantity: &str) -> JetError {
        match self {
            JetError::OrderBudget {
                needed, available, ..
            } => JetError::OrderBudget {
                quantity: quantity.to_string(),
                needed,
                available,
            },
            e => e,
        }
    }
}

struct Tables {
    exps: Vec<[u8; NVARS]>,
    deg: Vec<u8>,
    count: [usize; MAX_ORDER + 1],
    succ: Vec<[u32; NVARS]>,
    swap: Vec<u32>,
    mul_off: Vec<usize>,
    mul_tab: Vec<u16>,
}

const NONE: u32 = u32::MAX;

fn binom(n: usize, k: usize) -> usize {
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

fn push_degree(d: usize, var: usize, cur: &mut [u8; NVARS], out: &mut Vec<[u8; NVARS]>) {
    if var == NVARS - 1 {
        cur[var] = d as u8;
        out.push(*cur);
        return;
    }
    for k in (0..=d).rev() {
        cur[var] = k as u8;
        push_degree(d - k, var + 1, cur, out);
    }
    cur[var] = 0;
}

impl Tables {
    fn build() -> Tables {
        let mut exps = Vec::new();
        let mut cur = [0u8; NVARS];
        for d in 0..=MAX_ORDER {
            push_degree(d, 0, &mut cur, &mut exps);
        }
        let mut count = [0usize; MAX_ORDER + 1];
        for (k, c) in count.iter_mut().enumerate() {
            *c = binom(k + NVARS, NVARS);
        }
        assert_eq!(exps.len(), count[MAX_ORDER]);
        assert!(exps.len() <= u16::MAX as usize);
        let rank: std::collections::HashMap<[u8; NVARS], u32> = exps
            .iter()
            .enumerate()
            .map(|(r, e)| (*e, r as u32))
            .collect();
        let deg: Vec<u8> = exps.iter().map(|e| e.iter().sum()).collect();
        let mut succ = vec![[NONE; NVARS]; exps.len()];
        let mut swap = vec![0u32; exps.len()];
        let mut parent = vec![0u32; exps.len()];
        let mut pvar = vec![0u8; exps.len()];
        for (r, e) in exps.iter().enumerate() {
            for v in 0..NVARS {
                let mut f = *e;
                f[v] += 1;
                if let Some(&t) = rank.get(&f) {
                    succ[r][v] = t;
                }
            }
            let mut s = [0u8; NVARS];
            s[..4].copy_from_slice(&e[4..]);
            s[4..].copy_from_slice(&e[..4]);
            swap[r] = rank[&s];
            if r > 0 {
                let v = e.iter().position(|&x| x > 0).unwrap();
                let mut f = *e;
                f[v] -= 1;
                parent[r] = rank[&f];
                pvar[r] = v as u8;
            }
        }
        let mut mul_off = Vec::with_capacity(exps.len() + 1);
        let mut mul_tab: Vec<u16> = Vec::new();
        for a in 0..exps.len() {
            mul_off.push(mul_tab.len());
            let lim = count[MAX_ORDER - deg[a] as usize];
            let start = mul_tab.len();
            mul_tab.push(a as u16);
            for b in 1..lim {
                let p = mul_tab[start + parent[b] as usize] as usize;
                mul_tab.push(succ[p][pvar[b] as usize] as u16);
            }
        }
        mul_off.push(mul_tab.len());
        Tables {
            exps,
            deg,
            count,
            succ,
            swap,
            mul_off,
            mul_tab,
        }
    }
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(Tables::build)
}

/// Number of coefficients of a jet of the given order.
pub fn coeff_count(order: usize) -> usize {
    tables().count[order]
}

/// Position of a multi-index in the graded layout.
pub fn monomial_index(alpha: &[u8; NVARS]) -> Option<usize> {
    let t = tables();
    let mut r = 0usize;
    for (v, &k) in alpha.iter().enumerate() {
        for _ in 0..k {
            let s = *t.succ.get(r)?.get(v)?;
            if s == NONE {
                return None;
            }
            r = s as usize;
        }
    }
    Some(r)
}

/// Multi-index stored at a position of the graded layout.
pub fn monomial(rank: usize) -> [u8; NVARS] {
    tables().exps[rank]
}

/// Truncated power series of a fixed order.
#[derive(Clone, PartialEq)]
pub struct WJet {
    order: usize,
    c: Vec<Complex64>,
}

impl fmt::Debug for WJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WJet(order {}, value {})", self.order, self.c[0])
    }
}

impl WJet {
    pub fn zero(order: usize) -> WJet {
        WJet {
            order,
            c: vec![ZERO; coeff_count(order)],
        }
    }

    pub fn constant(order: usize, value: Complex64) -> WJet {
        let mut j = WJet::zero(order);
        j.c[0] = value;
        j
    }

    pub fn real(order: usize, value: f64) -> WJet {
        WJet::constant(order, Complex64::new(value, 0.0))
    }

    /// The seed `base + x_var`.
    pub fn variable(order: usize, var: Var, base: Complex64) -> WJet {
        let mut j = WJet::constant(order, base);
        if order > 0 {
            j.c[1 + var.index()] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn from_coeffs(order: usize, c: Vec<Complex64>) -> WJet {
        assert_eq!(c.len(), coeff_count(order));
        WJet { order, c }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.c
    }

    /// Value at the base point.
    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    pub fn coeff(&self, alpha: &[u8; NVARS]) -> Complex64 {
        match monomial_index(alpha) {
            Some(r) if r < self.c.len() => self.c[r],
            _ => ZERO,
        }
    }

    /// Partial derivative `∂^α f` at the base point.
    pub fn extract(&self, alpha: &[u8; NVARS]) -> Result<Complex64, JetError> {
        let d: usize = alpha.iter().map(|&k| k as usize).sum();
        if d > self.order {
            return Err(JetError::OrderBudget {
                quantity: "derivative extraction".into(),
                needed: d,
                available: self.order,
            });
        }
        let fact: f64 = alpha
            .iter()
            .map(|&k| (1..=k as u32).map(f64::from).product::<f64>())
            .product();
        Ok(self.coeff(alpha) * fact)
    }

    pub fn truncate(&self, order: usize) -> WJet {
        let order = order.min(self.order);
        WJet {
            order,
            c: self.c[..coeff_count(order)].to_vec(),
        }
    }

    /// Jet of `∂f/∂var`, one order lower.
    pub fn diff(&self, var: Var) -> Result<WJet, JetError> {
        if self.order == 0 {
            return Err(JetError::OrderBudget {
                quantity: format!("derivative in {}", var.name()),
                needed: 1,
                available: 0,
            });
        }
        let t = tables();
        let v = var.index();
        let n = self.order - 1;
        let mut c = vec![ZERO; coeff_count(n)];
        for (r, out) in c.iter_mut().enumerate() {
            let s = t.succ[r][v] as usize;
            *out = self.c[s] * f64::from(t.exps[r][v] + 1);
        }
        Ok(WJet { order: n, c })
    }

    /// Jet of the complex conjugate function.
    pub fn conj(&self) -> WJet {
        let t = tables();
        let c = (0..self.c.len())
            .map(|r| self.c[t.swap[r] as usize].conj())
            .collect();
        WJet {
            order: self.order,
            c,
        }
    }

    pub fn scale(&self, s: Complex64) -> WJet {
        WJet {
            order: self.order,
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> WJet {
        WJet {
            order: self.order,
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add_const(&self, s: Complex64) -> WJet {
        let mut j = self.clone();
        j.c[0] += s;
        j
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    fn nonzeros(&self) -> usize {
        self.c.iter().filter(|x| **x != ZERO).count()
    }

    fn mul_into(x: &WJet, y: &WJet, order: usize) -> WJet {
        let t = tables();
        let mut out = vec![ZERO; coeff_count(order)];
        let len = out.len();
        for a in 0..len {
            let ca = x.c[a];
            if ca == ZERO {
                continue;
            }
            let lim = t.count[order - t.deg[a] as usize];
            let off = t.mul_off[a];
            let row = &t.mul_tab[off..off + lim];
            for (yb, &tgt) in y.c[..lim].iter().zip(row) {
                out[tgt as usize] += ca * yb;
            }
        }
        WJet { order, c: out }
    }

    pub fn mul_jet(&self, other: &WJet) -> WJet {
        let order = self.order.min(other.order);
        if self.nonzeros() <= other.nonzeros() {
            WJet::mul_into(self, other, order)
        } else {
            WJet::mul_into(other, self, order)
        }
    }

    /// `Σ_k coeffs[k] (f - f(0))^k`, the univariate Taylor composition.
    fn compose(&self, coeffs: &[Complex64]) -> WJet {
        let n = self.order;
        let mut h = self.clone();
        h.c[0] = ZERO;
        let mut out = WJet::constant(n, coeffs[0]);
        let mut p = h.clone();
        for (k, ck) in coeffs.iter().enumerate().take(n + 1).skip(1) {
            for (o, x) in out.c.iter_mut().zip(&p.c) {
                *o += x * ck;
            }
            if k < n {
                p = p.mul_jet(&h);
            }
        }
        out
    }

    fn require_positive_real(&self, func: &'static str) -> Result<f64, JetError> {
        let v = self.c[0];
        if v.re > 0.0 && v.im.abs() <= 1e-8 * v.re && v.re.is_finite() {
            Ok(v.re)
        } else {
            Err(JetError::Branch { func, value: v })
        }
    }

    pub fn recip(&self) -> Result<WJet, JetError> {
        let a0 = self.c[0];
        if !(a0.norm() > 1e-300) || !a0.re.is_finite() || !a0.im.is_finite() {
            return Err(JetError::ZeroDivisor);
        }
        let inv = a0.inv();
        let mut coeffs = Vec::with_capacity(self.order + 1);
        let mut p = inv;
        for _ in 0..=self.order {
            coeffs.push(p);
            p = -p * inv;
        }
        Ok(self.compose(&coeffs))
    }

    pub fn div_jet(&self, other: &WJet) -> Result<WJet, JetError> {
        Ok(self.mul_jet(&other.recip()?))
    }

    pub fn exp(&self) -> WJet {
        let e = self.c[0].exp();
        let mut coeffs = Vec::with_capacity(self.order + 1);
        let mut f = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                f /= k as f64;
            }
            coeffs.push(e * f);
        }
        self.compose(&coeffs)
    }

    pub fn ln(&self) -> Result<WJet, JetError> {
        let a0 = self.require_positive_real("log")?;
        let mut coeffs = vec![Complex64::new(a0.ln(), 0.0)];
        for k in 1..=self.order {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            coeffs.push(Complex64::new(sign / (k as f64 * a0.powi(k as i32)), 0.0));
        }
        Ok(self.compose(&coeffs))
    }

    /// Real power through the principal branch.
    pub fn powf(&self, p: f64) -> Result<WJet, JetError> {
        let a0 = self.require_positive_real("pow")?;
        let mut coeffs = Vec::with_capacity(self.order + 1);
        let mut b = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                b *= (p - (k - 1) as f64) / k as f64;
            }
            coeffs.push(Complex64::new(b * a0.powf(p - k as f64), 0.0));
        }
        Ok(self.compose(&coeffs))
    }

    pub fn sqrt(&self) -> Result<WJet, JetError> {
        self.powf(0.5).map_err(|e| match e {
            JetError::Branch { value, .. } => JetError::Branch {
                func: "sqrt",
                value,
            },
            e => e,
        })
    }

    /// Integer power by repeated squaring; negative exponents go through `recip`.
    pub fn powi(&self, n: i32) -> Result<WJet, JetError> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = WJet::real(self.order, 1.0);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_jet(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_jet(&sq);
            }
        }
        Ok(acc)
    }

    /// Largest coefficient modulus, used in tolerance scaling.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

impl Add<&WJet> for &WJet {
    type Output = WJet;
    fn add(self, o: &WJet) -> WJet {
        let order = self.order.min(o.order);
        let n = coeff_count(order);
        WJet {
            order,
            c: self.c[..n]
                .iter()
                .zip(&o.c[..n])
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub<&WJet> for &WJet {
    type Output = WJet;
    fn sub(self, o: &WJet) -> WJet {
        let order = self.order.min(o.order);
        let n = coeff_count(order);
        WJet {
            order,
            c: self.c[..n]
                .iter()
                .zip(&o.c[..n])
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul<&WJet> for &WJet {
    type Output = WJet;
    fn mul(self, o: &WJet) -> WJet {
        self.mul_jet(o)
    }
}

impl Neg for &WJet {
    type Output = WJet;
    fn neg(self) -> WJet {
        WJet {
            order: self.order,
            c: self.c.iter().map(|x| -x).collect(),
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<WJet> for WJet {
            type Output = WJet;
            fn $m(self, o: WJet) -> WJet {
                (&self).$m(&o)
            }
        }
        impl $tr<&WJet> for WJet {
            type Output = WJet;
            fn $m(self, o: &WJet) -> WJet {
                (&self).$m(o)
            }
        }
        impl $tr<WJet> for &WJet {
            type Output = WJet;
            fn $m(self, o: WJet) -> WJet {
                self.$m(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for WJet {
    type Output = WJet;
    fn neg(self) -> WJet {
        -&self
    }
}

impl Mul<Complex64> for &WJet {
    type Output = WJet;
    fn mul(self, s: Complex64) -> WJet {
        self.scale(s)
    }
}

impl Mul<Complex64> for WJet {
    type Output = WJet;
    fn mul(self, s: Complex64) -> WJet {
        self.scale(s)
    }
}

impl Mul<f64> for &WJet {
    type Output = WJet;
    fn mul(self, s: f64) -> WJet {
        self.scale_re(s)
    }
}

impl Mul<f64> for WJet {
    type Output = WJet;
    fn mul(self, s: f64) -> WJet {
        self.scale_re(s)
    }
}

impl AddAssign<&WJet> for WJet {
    fn add_assign(&mut self, o: &WJet) {
        if o.order < self.order {
            *self = self.truncate(o.order);
        }
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            *a += b;
        }
    }
}

impl AddAssign<WJet> for WJet {
    fn add_assign(&mut self, o: WJet) {
        *self += &o;
    }
}

impl SubAssign<&WJet> for WJet {
    fn sub_assign(&mut self, o: &WJet) {
        if o.order < self.order {
            *self = self.truncate(o.order);
        }
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            *a -= b;
        }
    }
}

impl SubAssign<WJet> for WJet {
    fn sub_assign(&mut self, o: WJet) {
        *self -= &o;
    }
}

/// Truncation order and base point shared by every jet of one evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct JetContext {
    pub order: usize,
    pub point: Point,
}

impl JetContext {
    pub fn new(order: usize, point: Point) -> Result<JetContext, JetError> {
        if !(2..=MAX_ORDER).contains(&order) {
            return Err(JetError::InvalidOrder(order));
        }
        if point.eta[0] == ZERO && point.eta[1] == ZERO {
            return Err(JetError::ZeroEta);
        }
        Ok(JetContext { order, point })
    }

    /// Seeds for the eight variables; barred seeds sit at the conjugate base values.
    pub fn seeds(&self) -> [WJet; NVARS] {
        let p = &self.point;
        std::array::from_fn(|k| {
            let var = Var::from_index(k);
            let base = match var {
                Var::Z(i) => p.z[i],
                Var::Eta(i) => p.eta[i],
                Var::ZBar(i) => p.z[i].conj(),
                Var::EtaBar(i) => p.eta[i].conj(),
            };
            WJet::variable(self.order, var, base)
        })
    }

    pub fn constant(&self, v: Complex64) -> WJet {
        WJet::constant(self.order, v)
    }
}
