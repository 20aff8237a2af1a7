//! Exact arithmetic in F_p, F_{p^r} and Z_m, additive characters of the
//! plane over these rings, and the arithmetic functions tau, gamma, Omega
//! and g that appear in the Z_m spectral bound.
//!
//! Every element is an [`Elem`]: a canonical integer code in `[0, order)`.
//! For Z_m and F_p the code is the residue itself. For F_{p^r} = F_p[t]/(f)
//! the code of `c_0 + c_1 t + ... + c_{r-1} t^{r-1}` is `sum c_i p^i`, so the
//! prime subfield is exactly the codes `0..p`.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ring order accepted at construction.
pub const MAX_ORDER: u32 = 1 << 20;
/// Largest extension degree accepted (irreducibility is checked exhaustively).
pub const MAX_EXTENSION_DEGREE: u32 = 4;

/// A ring element in canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point of the plane H = R x R.
pub type Point = (Elem, Elem);

/// Value of an additive character, a complex number of modulus one.
pub type CharacterValue = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RingKind {
    PrimeField,
    ExtensionField,
    ModularRing,
}

/// Ambient coefficient ring: F_p, F_{p^r}, or Z_m.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RingCtx {
    kind: RingKind,
    /// Characteristic for fields, the modulus for Z_m.
    p: u32,
    r: u32,
    /// Monic modulus of the extension, low degree first, length r + 1.
    irreducible: Vec<u32>,
    order: u32,
    /// `p^i` for `i < r`, used to split codes into digits.
    #[serde(skip)]
    radix: Vec<u32>,
    /// Trace of `t^i` for `i < r` (fields only).
    #[serde(skip)]
    trace_basis: Vec<u32>,
}

impl RingCtx {
    /// The prime field F_p.
    pub fn prime_field(p: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidRing(format!("{p} is not prime")));
        }
        if p > MAX_ORDER {
            return Err(Error::TooLarge { what: "ring order", size: p as u64, cap: MAX_ORDER as u64 });
        }
        Ok(RingCtx {
            kind: RingKind::PrimeField,
            p,
            r: 1,
            irreducible: Vec::new(),
            order: p,
            radix: vec![1],
            trace_basis: vec![1],
        })
    }

    /// The ring Z_m, m >= 2.
    pub fn modular(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidRing(format!("modulus must be at least 2, got {m}")));
        }
        if m > MAX_ORDER {
            return Err(Error::TooLarge { what: "ring order", size: m as u64, cap: MAX_ORDER as u64 });
        }
        Ok(RingCtx {
            kind: RingKind::ModularRing,
            p: m,
            r: 1,
            irreducible: Vec::new(),
            order: m,
            radix: vec![1],
            trace_basis: Vec::new(),
        })
    }

    /// F_{p^r} using the lexicographically smallest monic irreducible of
    /// degree r (ordered by the code `sum c_i p^i` of its lower coefficients).
    /// `r = 1` gives the prime field.
    pub fn field(p: u32, r: u32) -> Result<Self> {
        if r == 1 {
            return Self::prime_field(p);
        }
        Self::check_extension_params(p, r)?;
        let modulus = smallest_irreducible(p, r as usize);
        Self::build_extension(p, r, modulus)
    }

    /// F_{p^r} = F_p[t]/(f) with a caller-supplied monic `f`, given as the
    /// `r + 1` coefficients from the constant term up.
    pub fn extension_with(p: u32, irreducible: Vec<u32>) -> Result<Self> {
        if irreducible.len() < 3 {
            return Err(Error::InvalidRing("extension modulus must have degree at least 2".into()));
        }
        let r = (irreducible.len() - 1) as u32;
        Self::check_extension_params(p, r)?;
        if *irreducible.last().unwrap() != 1 {
            return Err(Error::InvalidRing("extension modulus must be monic".into()));
        }
        if irreducible.iter().any(|&c| c >= p) {
            return Err(Error::InvalidRing("modulus coefficients must be reduced mod p".into()));
        }
        if !is_irreducible(&irreducible, p) {
            return Err(Error::InvalidRing(format!("{irreducible:?} is reducible over F_{p}")));
        }
        Self::build_extension(p, r, irreducible)
    }

    /// Parse `p` or `p^r`.
    pub fn parse_field(text: &str) -> Result<Self> {
        let bad = || Error::InvalidRing(format!("cannot parse field spec {text:?}"));
        let (p, r) = match text.trim().split_once('^') {
            Some((p, r)) => (p.trim().parse().map_err(|_| bad())?, r.trim().parse().map_err(|_| bad())?),
            None => (text.trim().parse().map_err(|_| bad())?, 1),
        };
        Self::field(p, r)
    }

    fn check_extension_params(p: u32, r: u32) -> Result<()> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidRing(format!("{p} is not prime")));
        }
        if r > MAX_EXTENSION_DEGREE {
            return Err(Error::InvalidRing(format!(
                "extension degree {r} exceeds {MAX_EXTENSION_DEGREE}"
            )));
        }
        let order = (p as u64).checked_pow(r).unwrap_or(u64::MAX);
        if order > MAX_ORDER as u64 {
            return Err(Error::TooLarge { what: "ring order", size: order, cap: MAX_ORDER as u64 });
        }
        Ok(())
    }

    fn build_extension(p: u32, r: u32, irreducible: Vec<u32>) -> Result<Self> {
        let radix: Vec<u32> = (0..r).map(|i| p.pow(i)).collect();
        let mut ctx = RingCtx {
            kind: RingKind::ExtensionField,
            p,
            r,
            irreducible,
            order: p.pow(r),
            radix,
            trace_basis: Vec::new(),
        };
        // Trace of each basis monomial straight from t + t^p + ... + t^{p^{r-1}}.
        let basis: Vec<u32> = (0..r)
            .map(|i| {
                let t_i = ctx.basis_monomial(i as usize);
                let tr = ctx.frobenius_trace(t_i);
                debug_assert!(tr.0 < p);
                tr.0
            })
            .collect();
        ctx.trace_basis = basis;
        Ok(ctx)
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn is_field(&self) -> bool {
        self.kind != RingKind::ModularRing
    }

    /// Number of elements.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// The characteristic p for fields, the modulus m for Z_m. This is also
    /// the order of the roots of unity the additive characters take.
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Extension degree r (1 for F_p and Z_m).
    pub fn degree(&self) -> u32 {
        self.r
    }

    /// The extension modulus, constant term first (empty unless F_{p^r}).
    pub fn irreducible(&self) -> &[u32] {
        &self.irreducible
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order).map(Elem)
    }

    /// Canonical element for a raw code, if in range.
    pub fn elem(&self, code: u32) -> Result<Elem> {
        if code < self.order {
            Ok(Elem(code))
        } else {
            Err(Error::InvalidRing(format!("{code} is not a canonical element (order {})", self.order)))
        }
    }

    /// Image of an integer under the unique ring map Z -> R.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    /// Coefficient vector (constant term first) of an F_{p^r} element;
    /// a single entry otherwise.
    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        (0..self.r as usize).map(|i| self.digit(a, i)).collect()
    }

    /// Element with the given coefficient vector (reduced mod p).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Elem {
        let mut code = 0u32;
        for (i, &c) in coeffs.iter().enumerate().take(self.r as usize) {
            code += (c % self.p) * self.radix[i];
        }
        Elem(code)
    }

    #[inline]
    fn digit(&self, a: Elem, i: usize) -> u32 {
        (a.0 / self.radix[i]) % self.p
    }

    fn basis_monomial(&self, i: usize) -> Elem {
        // t^i for i < r is a single digit; higher powers via multiplication.
        if i < self.r as usize {
            Elem(self.radix[i])
        } else {
            let t = Elem(self.radix[1]);
            self.pow(t, i as u64)
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match self.kind {
            RingKind::ExtensionField => {
                let mut code = 0;
                for i in 0..self.r as usize {
                    let s = (self.digit(a, i) + self.digit(b, i)) % self.p;
                    code += s * self.radix[i];
                }
                Elem(code)
            }
            _ => {
                let s = a.0 as u64 + b.0 as u64;
                Elem((s % self.p as u64) as u32)
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        match self.kind {
            RingKind::ExtensionField => {
                let mut code = 0;
                for i in 0..self.r as usize {
                    let d = self.digit(a, i);
                    code += ((self.p - d) % self.p) * self.radix[i];
                }
                Elem(code)
            }
            _ => Elem((self.p - a.0) % self.p),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match self.kind {
            RingKind::ExtensionField => self.ext_mul(a, b),
            _ => Elem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32),
        }
    }

    fn ext_mul(&self, a: Elem, b: Elem) -> Elem {
        let r = self.r as usize;
        let p = self.p as u64;
        let mut da = [0u64; MAX_EXTENSION_DEGREE as usize];
        let mut db = [0u64; MAX_EXTENSION_DEGREE as usize];
        for i in 0..r {
            da[i] = self.digit(a, i) as u64;
            db[i] = self.digit(b, i) as u64;
        }
        let mut prod = [0u64; 2 * MAX_EXTENSION_DEGREE as usize];
        for i in 0..r {
            if da[i] == 0 {
                continue;
            }
            for j in 0..r {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            }
        }
        // Reduce using t^r = -(f_0 + f_1 t + ... + f_{r-1} t^{r-1}).
        for top in (r..2 * r - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (k, &f) in self.irreducible[..r].iter().enumerate() {
                let idx = top - r + k;
                prod[idx] = (prod[idx] + c * (p - f as u64)) % p;
            }
        }
        Elem(prod[..r].iter().zip(&self.radix).map(|(&c, &w)| c as u32 * w).sum())
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn one(&self) -> Elem {
        Elem(1)
    }

    pub fn is_unit(&self, a: Elem) -> bool {
        match self.kind {
            RingKind::ModularRing => gcd(a.0 as u64, self.p as u64) == 1,
            _ => !a.is_zero(),
        }
    }

    /// Multiplicative inverse; `NotAUnit` for zero or, in Z_m, any non-unit.
    pub fn inv(&self, a: Elem) -> Result<Elem> {
        match self.kind {
            RingKind::ExtensionField => {
                if a.is_zero() {
                    Err(Error::NotAUnit(0))
                } else {
                    Ok(self.pow(a, self.order as u64 - 2))
                }
            }
            _ => mod_inverse(a.0 as u64, self.p as u64)
                .map(|v| Elem(v as u32))
                .ok_or(Error::NotAUnit(a.0 as u64)),
        }
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Absolute trace to the prime subfield. The result is an element of
    /// F_p, i.e. a code below the characteristic.
    pub fn trace(&self, z: Elem) -> Result<Elem> {
        match self.kind {
            RingKind::ModularRing => Err(Error::WrongKind { expected: "a field", found: self.kind }),
            RingKind::PrimeField => Ok(z),
            RingKind::ExtensionField => Ok(Elem(self.trace_code(z))),
        }
    }

    /// Trace computed as `z + z^p + ... + z^{p^{r-1}}`.
    pub fn frobenius_trace(&self, z: Elem) -> Elem {
        let mut acc = Elem::ZERO;
        let mut term = z;
        for _ in 0..self.r {
            acc = self.add(acc, term);
            term = self.pow(term, self.p as u64);
        }
        acc
    }

    /// Trace via the precomputed values on the monomial basis.
    #[inline]
    fn trace_code(&self, z: Elem) -> u32 {
        let p = self.p as u64;
        let mut acc = 0u64;
        for i in 0..self.r as usize {
            acc += self.digit(z, i) as u64 * self.trace_basis[i] as u64;
        }
        (acc % p) as u32
    }

    /// `Tr(xi . x)` for fields and `xi . x mod m` for Z_m, as an integer in
    /// `[0, characteristic)`. The character is `exp(2 pi i k / characteristic)`.
    #[inline]
    pub fn pairing(&self, xi: Point, x: Point) -> u32 {
        let dot = self.add(self.mul(xi.0, x.0), self.mul(xi.1, x.1));
        match self.kind {
            RingKind::ExtensionField => self.trace_code(dot),
            _ => dot.0,
        }
    }

    /// The additive character `chi_xi(x)` of the plane.
    pub fn character(&self, xi: Point, x: Point) -> CharacterValue {
        unit_root(self.pairing(xi, x) as u64, self.p as u64)
    }

    /// Matrix of the trace form on the monomial basis: entry (i, j) is
    /// `Tr(t^{i+j})`. Pairing of digit vectors through this matrix equals the
    /// trace of the product.
    pub(crate) fn trace_form_row(&self, xi: Elem) -> Vec<u32> {
        // Digit i of the dual of xi: Tr(t^i * xi).
        (0..self.r as usize)
            .map(|i| match self.kind {
                RingKind::ExtensionField => self.trace_code(self.mul(self.basis_monomial(i), xi)),
                _ => xi.0,
            })
            .collect()
    }

    /// Element whose digit vector pairs with digit vectors of `x` like
    /// `Tr(xi * x)` does.
    pub(crate) fn trace_dual(&self, xi: Elem) -> Elem {
        match self.kind {
            RingKind::ExtensionField => self.from_coeffs(&self.trace_form_row(xi)),
            _ => xi,
        }
    }
}

/// `exp(2 pi i k / n)`.
#[inline]
pub fn unit_root(k: u64, n: u64) -> Complex64 {
    let angle = TAU * ((k % n) as f64) / n as f64;
    Complex64::new(angle.cos(), angle.sin())
}

/// Table of `exp(2 pi i k / n)` for `k < n`.
#[derive(Clone, Debug)]
pub struct UnitRoots {
    table: Vec<Complex64>,
}

impl UnitRoots {
    pub fn new(n: u32) -> Self {
        UnitRoots { table: (0..n as u64).map(|k| unit_root(k, n as u64)).collect() }
    }

    #[inline]
    pub fn get(&self, k: u32) -> Complex64 {
        self.table[k as usize]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Number of divisors of `n`.
pub fn tau(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Smallest prime divisor; `1` for `n = 1` by convention.
pub fn gamma(n: u64) -> u64 {
    factorize(n).first().map_or(1, |&(p, _)| p)
}

/// Euler's totient.
pub fn phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// All products of a nonempty set of distinct prime divisors of `n`, ascending.
pub fn omega_set(n: u64) -> Vec<u64> {
    let primes: Vec<u64> = factorize(n).into_iter().map(|(p, _)| p).collect();
    let mut out: Vec<u64> = (1u32..(1 << primes.len()))
        .map(|mask| {
            primes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &p)| p)
                .product()
        })
        .collect();
    out.sort_unstable();
    out
}

/// The weight g with g(1) = 0 and g(m) = tau(m) + sum over d in Omega(m)
/// of g(m / d). Memoized across the recursion.
pub fn g_weight(m: u64) -> u64 {
    let mut memo = HashMap::new();
    g_memo(m, &mut memo)
}

fn g_memo(m: u64, memo: &mut HashMap<u64, u64>) -> u64 {
    if m == 1 {
        return 0;
    }
    if let Some(&v) = memo.get(&m) {
        return v;
    }
    let v = tau(m) + omega_set(m).into_iter().map(|d| g_memo(m / d, memo)).sum::<u64>();
    memo.insert(m, v);
    v
}

/// The closed form `sum_{n | m} tau(m) tau(m/n)`. It does not agree with
/// [`g_weight`] (for a prime it gives 6 against 2); kept as a diagnostic.
pub fn g_closed_form(m: u64) -> u64 {
    let t = tau(m);
    divisors(m).into_iter().map(|n| t * tau(m / n)).sum()
}

/// tau, gamma, Omega and g for one modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArithFunctions {
    pub m: u64,
    pub tau: u64,
    pub gamma: u64,
    pub omega_set: Vec<u64>,
    pub g: u64,
}

pub fn arith_functions(m: u64) -> ArithFunctions {
    ArithFunctions {
        m,
        tau: tau(m),
        gamma: gamma(m),
        omega_set: omega_set(m),
        g: g_weight(m),
    }
}

// Dense polynomials over F_p, constant term first, used only for choosing
// and validating extension moduli.

fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let p64 = p as u64;
    let mut rem: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let dd = den.len() - 1;
    let lead_inv = mod_inverse(den[dd] as u64, p64).expect("nonzero leading coefficient");
    while rem.len() > dd {
        let top = rem.len() - 1;
        let c = rem[top] * lead_inv % p64;
        if c != 0 {
            for (k, &dk) in den.iter().enumerate() {
                let idx = top - dd + k;
                rem[idx] = (rem[idx] + p64 - c * dk as u64 % p64) % p64;
            }
        }
        rem.pop();
    }
    rem.into_iter().map(|c| c as u32).collect()
}

/// Exhaustive search for a monic factor of degree `1..=deg/2`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                g.push((c % p as u64) as u32);
                c /= p as u64;
            }
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, r: usize) -> Vec<u32> {
    let count = (p as u64).pow(r as u32);
    for code in 0..count {
        let mut f = Vec::with_capacity(r + 1);
        let mut c = code;
        for _ in 0..r {
            f.push((c % p as u64) as u32);
            c /= p as u64;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}
