//! Bivariate polynomials over a [`RingCtx`].
//!
//! Besides arithmetic and evaluation this module decides whether a
//! polynomial has the form `Q(L(x1, x2))` for a univariate `Q` and a linear
//! form `L`, finds linear factors, and computes the level values `a` for
//! which `P - a` has a linear factor. All three work by the same device:
//! for each normalized direction `(alpha, beta)` substitute coordinates in
//! which `u = alpha*x1 + beta*x2` and read off the dependence on the
//! complementary coordinate `v`. This is exact symbolic work and does not
//! rely on derivatives, so it is safe in every characteristic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::algebra::{Elem, Point, RingCtx};
use crate::error::{ensure_cap, Error, Result};
use crate::par;

/// Cap on `order^2` for full-plane enumeration.
pub const MAX_PLANE: u64 = 1 << 24;
/// Cap on intermediate total degree while parsing.
pub const MAX_PARSE_DEGREE: u32 = 1 << 12;

/// A bivariate polynomial; the term map never holds zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    ctx: RingCtx,
    terms: BTreeMap<(u32, u32), Elem>,
}

impl BiPoly {
    pub fn zero(ctx: &RingCtx) -> Self {
        BiPoly { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &RingCtx, c: Elem) -> Self {
        Self::monomial(ctx, 0, 0, c)
    }

    pub fn monomial(ctx: &RingCtx, i: u32, j: u32, c: Elem) -> Self {
        let mut p = Self::zero(ctx);
        if !c.is_zero() {
            p.terms.insert((i, j), c);
        }
        p
    }

    pub fn x1(ctx: &RingCtx) -> Self {
        Self::monomial(ctx, 1, 0, Elem::ONE)
    }

    pub fn x2(ctx: &RingCtx) -> Self {
        Self::monomial(ctx, 0, 1, Elem::ONE)
    }

    /// Build from `((i, j), coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I>(ctx: &RingCtx, terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), Elem)>,
    {
        let mut p = Self::zero(ctx);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: (u32, u32), c: Elem) {
        if c.is_zero() {
            return;
        }
        let ctx = &self.ctx;
        let entry = self.terms.entry(e).or_insert(Elem::ZERO);
        *entry = ctx.add(*entry, c);
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Parse an expression and require `degree < order`.
    pub fn parse(text: &str, ctx: &RingCtx) -> Result<Self> {
        let p = Self::parse_any_degree(text, ctx)?;
        if p.degree() >= ctx.order() {
            return Err(Error::DegreeTooLarge { degree: p.degree(), order: ctx.order() });
        }
        Ok(p)
    }

    /// Parse without the `degree < order` restriction (still bounded by
    /// [`MAX_PARSE_DEGREE`]).
    pub fn parse_any_degree(text: &str, ctx: &RingCtx) -> Result<Self> {
        Parser::new(text, ctx).parse()
    }

    pub fn ctx(&self) -> &RingCtx {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), Elem)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Elem {
        self.terms.get(&(i, j)).copied().unwrap_or(Elem::ZERO)
    }

    /// Total degree; 0 for constants and the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&e| e == (0, 0))
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c);
        }
        out
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(&e, &c)| (e, self.ctx.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.neg())
    }

    /// `P - a`.
    pub fn sub_const(&self, a: Elem) -> BiPoly {
        let mut out = self.clone();
        out.add_term((0, 0), self.ctx.neg(a));
        out
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut out = Self::zero(&self.ctx);
        for (&(i1, j1), &c1) in &self.terms {
            for (&(i2, j2), &c2) in &other.terms {
                out.add_term((i1 + i2, j1 + j2), self.ctx.mul(c1, c2));
            }
        }
        out
    }

    pub fn scale(&self, c: Elem) -> BiPoly {
        Self::from_terms(&self.ctx, self.terms().map(|(e, t)| (e, self.ctx.mul(t, c))))
    }

    pub fn pow(&self, mut e: u64) -> BiPoly {
        let mut base = self.clone();
        let mut acc = Self::constant(&self.ctx, Elem::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn eval(&self, x: Point) -> Elem {
        let ctx = &self.ctx;
        let (mut p1, mut p2) = (vec![Elem::ONE], vec![Elem::ONE]);
        let deg = self.degree() as usize;
        for k in 1..=deg {
            p1.push(ctx.mul(p1[k - 1], x.0));
            p2.push(ctx.mul(p2[k - 1], x.1));
        }
        self.terms.iter().fold(Elem::ZERO, |acc, (&(i, j), &c)| {
            ctx.add(acc, ctx.mul(c, ctx.mul(p1[i as usize], p2[j as usize])))
        })
    }

    /// `P(x1, x2)` for every point of the plane, indexed `x1 * q + x2`.
    pub fn value_table(&self) -> Result<Vec<Elem>> {
        let ctx = &self.ctx;
        let q = ctx.order() as usize;
        ensure_cap("plane", (q as u64) * (q as u64), MAX_PLANE)?;
        let deg2 = self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0) as usize;
        let mut table = vec![Elem::ZERO; q * q];
        par::for_each_chunk_mut(&mut table, q, |row, out| {
            let x1 = Elem(row as u32);
            // Collapse to a univariate polynomial in x2, then Horner.
            let mut coeffs = vec![Elem::ZERO; deg2 + 1];
            for (&(i, j), &c) in &self.terms {
                let t = ctx.mul(c, ctx.pow(x1, i as u64));
                coeffs[j as usize] = ctx.add(coeffs[j as usize], t);
            }
            for (x2, slot) in out.iter_mut().enumerate() {
                let x2 = Elem(x2 as u32);
                *slot = coeffs.iter().rev().fold(Elem::ZERO, |acc, &c| ctx.add(ctx.mul(acc, x2), c));
            }
        });
        Ok(table)
    }

    /// Substitute `x1 = m[0][0] u + m[0][1] v`, `x2 = m[1][0] u + m[1][1] v`.
    /// Returns the coefficient grid `grid[a][b]` of `u^a v^b`.
    fn linear_substitute(&self, m: [[Elem; 2]; 2]) -> Vec<Vec<Elem>> {
        let ctx = &self.ctx;
        let k = self.degree() as usize;
        let binom = binomials(ctx, k);
        let mut grid = vec![vec![Elem::ZERO; k + 1]; k + 1];
        // Expansion of (s u + t v)^n as coefficients of u^{n-l} v^l.
        let expand = |s: Elem, t: Elem, n: usize| -> Vec<Elem> {
            (0..=n)
                .map(|l| {
                    ctx.mul(binom[n][l], ctx.mul(ctx.pow(s, (n - l) as u64), ctx.pow(t, l as u64)))
                })
                .collect()
        };
        for (&(i, j), &c) in &self.terms {
            let e1 = expand(m[0][0], m[0][1], i as usize);
            let e2 = expand(m[1][0], m[1][1], j as usize);
            for (l1, &c1) in e1.iter().enumerate() {
                if c1.is_zero() {
                    continue;
                }
                let cc1 = ctx.mul(c, c1);
                for (l2, &c2) in e2.iter().enumerate() {
                    let a = (i as usize - l1) + (j as usize - l2);
                    let b = l1 + l2;
                    grid[a][b] = ctx.add(grid[a][b], ctx.mul(cc1, c2));
                }
            }
        }
        grid
    }

    /// Write `P` in coordinates `u = L(x)`, `v` complementary, and return
    /// `[R_0, R_1, ..., R_k]` with `P = sum_b R_b(u) v^b`.
    fn directional_form(&self, dir: &LinearForm) -> Vec<UniPoly> {
        let ctx = &self.ctx;
        let one = Elem::ONE;
        let m = if dir.alpha == one {
            // u = x1 + beta x2, v = x2.
            [[one, ctx.neg(dir.beta)], [Elem::ZERO, one]]
        } else {
            // u = alpha x1 + x2, v = x1.
            debug_assert_eq!(dir.beta, one);
            [[Elem::ZERO, one], [one, ctx.neg(dir.alpha)]]
        };
        let grid = self.linear_substitute(m);
        let k = grid.len();
        (0..k)
            .map(|b| UniPoly::new(ctx, (0..k).map(|a| grid[a][b]).collect()))
            .collect()
    }

    /// Decide whether `P = Q(L)` for a homogeneous linear form `L`.
    pub fn degeneracy_test(&self) -> Result<Degeneracy> {
        if self.is_constant() {
            return Err(Error::ConstantPolynomial);
        }
        let dirs: Vec<LinearForm> = directions(&self.ctx).collect();
        let hits = par::map_slice(&dirs, |dir| {
            let rows = self.directional_form(dir);
            if rows[1..].iter().all(UniPoly::is_zero) {
                Some(rows.into_iter().next().unwrap())
            } else {
                None
            }
        });
        let Some((dir, q)) = dirs.into_iter().zip(hits).find_map(|(d, h)| h.map(|q| (d, q))) else {
            return Ok(Degeneracy::NonDegenerate);
        };
        let back = q.compose_linear(&dir);
        if back != *self {
            return Err(Error::InvariantViolated(format!(
                "Q(L) = {back} does not reproduce P = {self}"
            )));
        }
        Ok(Degeneracy::Degenerate { q, l: dir })
    }

    pub fn is_degenerate(&self) -> Result<bool> {
        Ok(matches!(self.degeneracy_test()?, Degeneracy::Degenerate { .. }))
    }

    fn require_factorable(&self) -> Result<()> {
        if !self.ctx.is_field() {
            return Err(Error::WrongKind { expected: "a field", found: self.ctx.kind() });
        }
        if self.degree() >= self.ctx.order() {
            return Err(Error::DegreeTooLarge { degree: self.degree(), order: self.ctx.order() });
        }
        Ok(())
    }

    /// Every affine line `L = c` (normalized direction, `c` in the field)
    /// for which `P - a` vanishes on the line for some `a`, with that `a`.
    /// Ordered by direction, then by `c`.
    pub fn linear_factor_levels(&self) -> Result<Vec<(LinearForm, Elem)>> {
        self.require_factorable()?;
        let ctx = &self.ctx;
        let dirs: Vec<LinearForm> = directions(ctx).collect();
        let per_dir = par::map_slice(&dirs, |dir| {
            let rows = self.directional_form(dir);
            // P restricted to u = c is sum_b R_b(c) v^b, constant in v iff
            // c is a common root of R_1, ..., R_k.
            let common = rows[1..]
                .iter()
                .fold(UniPoly::zero(ctx), |g, r| g.gcd(r));
            if !common.is_zero() && common.degree() == 0 {
                return Vec::new();
            }
            ctx.elements()
                .filter(|&c| common.eval(c).is_zero())
                .map(|c| (dir.with_offset(c), rows[0].eval(c)))
                .collect::<Vec<_>>()
        });
        Ok(per_dir.into_iter().flatten().collect())
    }

    /// A linear (affine) factor of `P`, if any. Field only, `degree < order`.
    pub fn has_linear_factor(&self) -> Result<Option<LinearForm>> {
        self.require_factorable()?;
        if self.is_zero() {
            return Ok(directions(&self.ctx).next());
        }
        if self.is_constant() {
            return Ok(None);
        }
        Ok(self
            .linear_factor_levels()?
            .into_iter()
            .find(|(_, a)| a.is_zero())
            .map(|(l, _)| l))
    }

    /// Values `a` for which `P - a` has a linear factor. For non-degenerate
    /// `P` there are at most `degree - 1` of them.
    pub fn bad_set(&self) -> Result<Vec<Elem>> {
        self.require_factorable()?;
        if self.degeneracy_test()?.is_degenerate() {
            return Err(Error::DegenerateInput);
        }
        let levels: BTreeSet<Elem> = self.linear_factor_levels()?.into_iter().map(|(_, a)| a).collect();
        let k = self.degree() as usize;
        if levels.len() + 1 > k {
            return Err(Error::TheoremViolation(format!(
                "{} bad levels for non-degenerate P of degree {k}",
                levels.len()
            )));
        }
        Ok(levels.into_iter().collect())
    }

    /// All zeros of `P` in the plane, in lexicographic order.
    pub fn root_set(&self) -> Result<Vec<Point>> {
        let table = self.value_table()?;
        Ok(level_set(&table, self.ctx.order(), Elem::ZERO))
    }

    /// `P(x) = P(-x)` for every point. Even total degree of every monomial
    /// settles it; otherwise fall back to evaluation over the whole plane.
    pub fn is_symmetric(&self) -> Result<bool> {
        if self.terms.keys().all(|&(i, j)| (i + j) % 2 == 0) {
            return Ok(true);
        }
        if self.ctx.characteristic() == 2 {
            return Ok(true);
        }
        let ctx = &self.ctx;
        let q = ctx.order() as usize;
        let table = self.value_table()?;
        let flips = par::fold_range(
            q * q,
            || 0usize,
            |acc, idx| {
                let x = (Elem((idx / q) as u32), Elem((idx % q) as u32));
                let neg = (ctx.neg(x.0).0 as usize) * q + ctx.neg(x.1).0 as usize;
                acc + usize::from(table[idx] != table[neg])
            },
            |a, b| a + b,
        );
        Ok(flips == 0)
    }
}

/// Points `x` with `table[x] == a`, for a table indexed `x1 * q + x2`.
pub fn level_set(table: &[Elem], q: u32, a: Elem) -> Vec<Point> {
    table
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == a)
        .map(|(idx, _)| (Elem(idx as u32 / q), Elem(idx as u32 % q)))
        .collect()
}

fn binomials(ctx: &RingCtx, n: usize) -> Vec<Vec<Elem>> {
    let mut rows: Vec<Vec<Elem>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![Elem::ONE; i + 1];
        for l in 1..i {
            row[l] = ctx.add(rows[i - 1][l - 1], rows[i - 1][l]);
        }
        rows.push(row);
    }
    rows
}

/// Normalized directions in canonical order: `(1, beta)` for every
/// `beta`, then `(alpha, 1)` for every non-unit `alpha` (just `(0, 1)` over
/// a field).
pub fn directions(ctx: &RingCtx) -> impl Iterator<Item = LinearForm> + '_ {
    let firsts = ctx.elements().map(|b| LinearForm::new(Elem::ONE, b));
    let seconds = ctx
        .elements()
        .filter(|&a| !ctx.is_unit(a))
        .map(|a| LinearForm::new(a, Elem::ONE));
    firsts.chain(seconds)
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by_key(|(&(i, j), _)| (std::cmp::Reverse(i + j), std::cmp::Reverse(i)));
        for (n, (&(i, j), &c)) in ordered.into_iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let mut parts = Vec::new();
            if c != Elem::ONE || (i, j) == (0, 0) {
                parts.push(c.to_string());
            }
            for (var, e) in [("x1", i), ("x2", j)] {
                match e {
                    0 => {}
                    1 => parts.push(var.to_string()),
                    e => parts.push(format!("{var}^{e}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl Serialize for BiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A univariate polynomial, constant term first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    ctx: RingCtx,
    coeffs: Vec<Elem>,
}

impl UniPoly {
    pub fn new(ctx: &RingCtx, mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { ctx: ctx.clone(), coeffs }
    }

    pub fn zero(ctx: &RingCtx) -> Self {
        Self::new(ctx, Vec::new())
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Elem) -> Elem {
        let ctx = &self.ctx;
        self.coeffs.iter().rev().fold(Elem::ZERO, |acc, &c| ctx.add(ctx.mul(acc, z), c))
    }

    /// Remainder of division by `d`; `d` must have a unit leading coefficient.
    fn rem(&self, d: &UniPoly) -> UniPoly {
        let ctx = &self.ctx;
        let dd = d.degree();
        let lead_inv = ctx.inv(*d.coeffs.last().unwrap()).expect("unit leading coefficient");
        let mut r = self.coeffs.clone();
        while r.len() > dd {
            let top = r.len() - 1;
            let c = ctx.mul(r[top], lead_inv);
            if !c.is_zero() {
                for (k, &dk) in d.coeffs.iter().enumerate() {
                    let idx = top - dd + k;
                    r[idx] = ctx.sub(r[idx], ctx.mul(c, dk));
                }
            }
            r.pop();
        }
        UniPoly::new(ctx, r)
    }

    /// Greatest common divisor (field coefficients); `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    /// `Q(L(x1, x2))`, including the affine offset of `L`.
    pub fn compose_linear(&self, l: &LinearForm) -> BiPoly {
        let ctx = &self.ctx;
        let lin = l.to_poly(ctx);
        let mut acc = BiPoly::zero(ctx);
        let mut power = BiPoly::constant(ctx, Elem::ONE);
        for &c in &self.coeffs {
            acc = acc.add(&power.scale(c));
            power = power.mul(&lin);
        }
        acc
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| match (i, c == Elem::ONE) {
                (0, _) => c.to_string(),
                (1, true) => "z".into(),
                (1, false) => format!("{c}*z"),
                (_, true) => format!("z^{i}"),
                (_, false) => format!("{c}*z^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for UniPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The affine form `alpha*x1 + beta*x2 - offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LinearForm {
    pub alpha: Elem,
    pub beta: Elem,
    pub offset: Elem,
}

impl LinearForm {
    pub fn new(alpha: Elem, beta: Elem) -> Self {
        LinearForm { alpha, beta, offset: Elem::ZERO }
    }

    pub fn with_offset(self, offset: Elem) -> Self {
        LinearForm { offset, ..self }
    }

    pub fn eval(&self, ctx: &RingCtx, x: Point) -> Elem {
        let lin = ctx.add(ctx.mul(self.alpha, x.0), ctx.mul(self.beta, x.1));
        ctx.sub(lin, self.offset)
    }

    pub fn to_poly(&self, ctx: &RingCtx) -> BiPoly {
        BiPoly::from_terms(
            ctx,
            [((1, 0), self.alpha), ((0, 1), self.beta), ((0, 0), ctx.neg(self.offset))],
        )
    }

    /// Scale so the first coefficient that is a unit becomes 1 (if any).
    pub fn normalized(&self, ctx: &RingCtx) -> Self {
        let pivot = if ctx.is_unit(self.alpha) {
            self.alpha
        } else if ctx.is_unit(self.beta) {
            self.beta
        } else {
            return *self;
        };
        let inv = ctx.inv(pivot).expect("unit");
        LinearForm {
            alpha: ctx.mul(self.alpha, inv),
            beta: ctx.mul(self.beta, inv),
            offset: ctx.mul(self.offset, inv),
        }
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (c, var) in [(self.alpha, "x1"), (self.beta, "x2")] {
            if c == Elem::ONE {
                parts.push(var.to_string());
            } else if !c.is_zero() {
                parts.push(format!("{c}*{var}"));
            }
        }
        write!(f, "{}", parts.join(" + "))?;
        if !self.offset.is_zero() {
            write!(f, " - {}", self.offset)?;
        }
        Ok(())
    }
}

/// Outcome of [`BiPoly::degeneracy_test`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Degeneracy {
    Degenerate { q: UniPoly, l: LinearForm },
    NonDegenerate,
}

impl Degeneracy {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Degeneracy::Degenerate { .. })
    }
}

// expr   := term (('+'|'-') term)*
// term   := factor ('*' factor)*
// factor := base ('^' uint)?
// base   := 'x1' | 'x2' | uint | '(' expr ')'
// A leading '-' on an expression is also accepted.
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a RingCtx,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, ctx: &'a RingCtx) -> Self {
        Parser { src: text.as_bytes(), pos: 0, ctx }
    }

    fn parse(mut self) -> Result<BiPoly> {
        let p = self.expr()?;
        self.skip_ws();
        if self.pos < self.src.len() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(p)
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<BiPoly> {
        let negate = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BiPoly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.factor()?;
            if acc.degree() + rhs.degree() > MAX_PARSE_DEGREE {
                return Err(Error::DegreeTooLarge { degree: acc.degree() + rhs.degree(), order: MAX_PARSE_DEGREE });
            }
            acc = acc.mul(&rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<BiPoly> {
        let base = self.base()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let start = self.pos;
        let digits = self.digits()?;
        let e: u64 = std::str::from_utf8(digits)
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { pos: start, msg: "exponent out of range".into() })?;
        let deg = (base.degree() as u64).saturating_mul(e);
        if deg > MAX_PARSE_DEGREE as u64 {
            return Err(Error::DegreeTooLarge { degree: deg.min(u32::MAX as u64) as u32, order: MAX_PARSE_DEGREE });
        }
        Ok(base.pow(e))
    }

    fn digits(&mut self) -> Result<&'a [u8]> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an unsigned integer"));
        }
        Ok(&self.src[start..self.pos])
    }

    fn base(&mut self) -> Result<BiPoly> {
        match self.peek() {
            Some(b'x') => {
                let var = self.src.get(self.pos + 1).copied();
                let p = match var {
                    Some(b'1') => BiPoly::x1(self.ctx),
                    Some(b'2') => BiPoly::x2(self.ctx),
                    _ => return Err(self.error("expected x1 or x2")),
                };
                self.pos += 2;
                if self.src.get(self.pos).is_some_and(u8::is_ascii_alphanumeric) {
                    return Err(self.error("expected x1 or x2"));
                }
                Ok(p)
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b) if b.is_ascii_digit() => {
                let m = self.ctx.characteristic() as u64;
                let value = self
                    .digits()?
                    .iter()
                    .fold(0u64, |acc, d| (acc * 10 + (d - b'0') as u64) % m);
                Ok(BiPoly::constant(self.ctx, Elem(value as u32)))
            }
            Some(_) => Err(self.error("expected x1, x2, an integer or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
