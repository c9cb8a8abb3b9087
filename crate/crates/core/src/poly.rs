//! Univariate polynomials with integer coefficients.
//!
//! Everything here is exact: gcds run over ℚ and are brought back to
//! primitive integer form, square-free parts come from Yun's algorithm and
//! complete factorization over ℤ uses Kronecker's interpolation method,
//! which is plenty for the small degrees of toral matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Integer polynomial, coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly { coeffs: vec![BigInt::one()] }
    }

    /// `x - a`
    pub fn linear_root(a: &BigInt) -> Self {
        IntPoly { coeffs: vec![-a.clone(), BigInt::one()] }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn pow(&self, k: usize) -> IntPoly {
        let mut out = IntPoly::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// Exact quotient over ℤ, or `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        if self.degree() < divisor.degree() {
            return None;
        }
        let lead = divisor.leading();
        let dd = divisor.degree();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let top = &rem[k + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&lead);
            if !r.is_zero() {
                return None;
            }
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &q * c;
            }
            quot[k] = q;
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(IntPoly::new(quot))
        } else {
            None
        }
    }

    pub fn divides(&self, other: &IntPoly) -> bool {
        other.div_exact(self).is_some()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Coefficients converted to `f64` (ascending).
    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    fn to_rat(&self) -> Vec<BigRational> {
        self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect()
    }

    fn from_rat_primitive(p: &[BigRational]) -> IntPoly {
        let lcm = p.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        IntPoly::new(p.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect())
            .primitive_part()
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.sign() == Sign::Minus;
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one() && k > 0;
            if !unit {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

fn rat_trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn rat_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    rat_trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db {
        let k = r.len() - 1 - db;
        let q = &r[r.len() - 1] / &lead;
        for (j, c) in b.iter().enumerate() {
            r[k + j] = &r[k + j] - &q * c;
        }
        r.pop();
        rat_trim(&mut r);
    }
    r
}

/// Greatest common divisor over ℚ, returned as a primitive integer
/// polynomial with positive leading coefficient.
pub fn gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_zero() {
        return b.primitive_part();
    }
    if b.is_zero() {
        return a.primitive_part();
    }
    let mut x = a.to_rat();
    let mut y = b.to_rat();
    while !y.is_empty() {
        let r = rat_rem(&x, &y);
        // keep sizes down
        x = IntPoly::from_rat_primitive(&y).to_rat();
        y = if r.is_empty() { r } else { IntPoly::from_rat_primitive(&r).to_rat() };
    }
    IntPoly::from_rat_primitive(&x)
}

/// Yun's square-free decomposition: `p = c · ∏ f_i^i` with the `f_i`
/// square-free and pairwise coprime. Returns the nonconstant `(f_i, i)`.
pub fn squarefree_decomposition(p: &IntPoly) -> Vec<(IntPoly, usize)> {
    let mut out = Vec::new();
    if p.degree() == 0 {
        return out;
    }
    let f = p.to_rat();
    let df = p.derivative().to_rat();
    let a0 = gcd(p, &p.derivative()).to_rat();
    let mut b = rat_div(&f, &a0);
    let mut c = rat_div(&df, &a0);
    let mut d = rat_sub(&c, &rat_derivative(&b));
    let mut i = 1;
    while b.len() > 1 {
        let a = gcd(&IntPoly::from_rat_primitive(&b), &IntPoly::from_rat_primitive(&d));
        if a.degree() > 0 {
            out.push((a.clone(), i));
        }
        let a = a.to_rat();
        b = rat_div(&b, &a);
        c = rat_div(&d, &a);
        d = rat_sub(&c, &rat_derivative(&b));
        i += 1;
    }
    out
}

fn rat_div(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    rat_trim(&mut r);
    if r.is_empty() {
        return r;
    }
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(db).max(1)];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let t = &r[r.len() - 1] / &lead;
        for (j, c) in b.iter().enumerate() {
            r[k + j] = &r[k + j] - &t * c;
        }
        q[k] = t;
        r.pop();
        rat_trim(&mut r);
    }
    debug_assert!(r.is_empty(), "rat_div called with a non-divisor");
    rat_trim(&mut q);
    q
}

fn rat_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    let mut out: Vec<BigRational> =
        (0..n).map(|k| a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero)).collect();
    rat_trim(&mut out);
    out
}

fn rat_derivative(a: &[BigRational]) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
        .collect();
    rat_trim(&mut out);
    out
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// The `n`-th cyclotomic polynomial.
pub fn cyclotomic(n: u64) -> IntPoly {
    assert!(n >= 1);
    let mut xn = vec![BigInt::zero(); n as usize + 1];
    xn[0] = -BigInt::one();
    xn[n as usize] = BigInt::one();
    let mut p = IntPoly::new(xn);
    for k in 1..n {
        if n % k == 0 {
            p = p.div_exact(&cyclotomic(k)).expect("cyclotomic division");
        }
    }
    p
}

/// All `n` with `φ(n) ≤ degree`, i.e. the orders of roots of unity that
/// can appear as roots of a degree-`degree` integer polynomial.
pub fn root_of_unity_orders(degree: usize) -> Vec<u64> {
    // φ(n) ≥ sqrt(n/2), so n ≤ 2·degree² bounds the search
    let cap = (2 * degree * degree).max(2) as u64;
    (1..=cap).filter(|&n| totient(n) as usize <= degree).collect()
}

/// Split off the cyclotomic factors of `p`: returns `(rest, [(order, multiplicity)])`.
pub fn cyclotomic_part(p: &IntPoly) -> (IntPoly, Vec<(u64, usize)>) {
    let mut rest = p.clone();
    let mut found = Vec::new();
    for n in root_of_unity_orders(p.degree()) {
        let phi = cyclotomic(n);
        let mut mult = 0;
        while rest.degree() >= phi.degree() {
            match rest.div_exact(&phi) {
                Some(q) => {
                    rest = q;
                    mult += 1;
                }
                None => break,
            }
        }
        if mult > 0 {
            found.push((n, mult));
        }
    }
    (rest, found)
}

/// Complete factorization over ℤ into primitive irreducible factors with
/// multiplicities (content and sign are dropped). Factors are sorted.
pub fn factor(p: &IntPoly) -> Vec<(IntPoly, usize)> {
    let mut out: Vec<(IntPoly, usize)> = Vec::new();
    for (sf, mult) in squarefree_decomposition(p) {
        let mut stack = vec![sf];
        while let Some(f) = stack.pop() {
            match kronecker_split(&f) {
                Some(g) => {
                    let h = f.div_exact(&g).expect("kronecker factor divides");
                    stack.push(g.primitive_part());
                    stack.push(h.primitive_part());
                }
                None => out.push((f, mult)),
            }
        }
    }
    out.sort();
    out
}

pub fn is_irreducible(p: &IntPoly) -> bool {
    if p.degree() == 0 {
        return false;
    }
    let f = factor(p);
    f.len() == 1 && f[0].1 == 1 && f[0].0.degree() == p.degree()
}

fn small_divisors(v: &BigInt) -> Option<Vec<BigInt>> {
    let n = v.abs().to_u64()?;
    if n == 0 {
        return None;
    }
    let mut divs = Vec::new();
    let mut d = 1u64;
    while d.checked_mul(d).is_some_and(|dd| dd <= n) {
        if n % d == 0 {
            divs.push(BigInt::from(d));
            if d != n / d {
                divs.push(BigInt::from(n / d));
            }
        }
        d += 1;
        if d > 1 << 22 {
            return None;
        }
    }
    divs.sort();
    Some(divs)
}

/// Find a nontrivial factor of a primitive polynomial by Kronecker's method.
fn kronecker_split(f: &IntPoly) -> Option<IntPoly> {
    let n = f.degree();
    if n <= 1 {
        return None;
    }
    // sample points 0, 1, -1, 2, -2, ...
    let mut samples: Vec<(BigInt, Vec<BigInt>)> = Vec::new();
    let mut step = 0i64;
    while samples.len() < n / 2 + 6 && step < 64 {
        let x = if step % 2 == 0 { BigInt::from(step / 2) } else { BigInt::from(-(step / 2) - 1) };
        step += 1;
        let v = f.eval(&x);
        if v.is_zero() {
            return Some(IntPoly::linear_root(&x));
        }
        if let Some(divs) = small_divisors(&v) {
            samples.push((x, divs));
        }
    }
    for k in 1..=n / 2 {
        if samples.len() < k + 1 {
            return None;
        }
        let mut chosen = samples.clone();
        chosen.sort_by_key(|(_, d)| d.len());
        chosen.truncate(k + 1);
        let xs: Vec<BigRational> =
            chosen.iter().map(|(x, _)| BigRational::from_integer(x.clone())).collect();
        let mut idx = vec![0usize; k + 1];
        // signs: first value positive, others both signs
        let radices: Vec<usize> = chosen
            .iter()
            .enumerate()
            .map(|(i, (_, d))| if i == 0 { d.len() } else { 2 * d.len() })
            .collect();
        loop {
            let ys: Vec<BigRational> = idx
                .iter()
                .zip(&chosen)
                .enumerate()
                .map(|(i, (&j, (_, d)))| {
                    let v = if i == 0 || j < d.len() { d[j % d.len()].clone() } else { -d[j - d.len()].clone() };
                    BigRational::from_integer(v)
                })
                .collect();
            if let Some(g) = interpolate_integer(&xs, &ys) {
                if g.degree() >= 1 && g.degree() < n && f.div_exact(&g).is_some() {
                    return Some(g);
                }
            }
            // odometer increment
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < radices[pos] {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == idx.len() {
                break;
            }
        }
    }
    None
}

/// Lagrange interpolation; `None` unless all coefficients are integers.
fn interpolate_integer(xs: &[BigRational], ys: &[BigRational]) -> Option<IntPoly> {
    let m = xs.len();
    let mut acc = vec![BigRational::zero(); m];
    for i in 0..m {
        // basis polynomial for node i
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for j in 0..m {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * &xs[j];
            }
            basis = next;
            denom *= &xs[i] - &xs[j];
        }
        let scale = &ys[i] / denom;
        for (k, c) in basis.iter().enumerate() {
            acc[k] += c * &scale;
        }
    }
    if acc.iter().any(|c| !c.is_integer()) {
        return None;
    }
    let p = IntPoly::new(acc.iter().map(|c| c.to_integer()).collect());
    if p.is_zero() {
        None
    } else {
        Some(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, -3, 1]).to_string(), "x^2 - 3x + 1");
        assert_eq!(p(&[-2, 1]).to_string(), "x - 2");
        assert_eq!(p(&[0, 0, -1]).to_string(), "-x^2");
    }

    #[test]
    fn cyclotomics() {
        assert_eq!(cyclotomic(1), p(&[-1, 1]));
        assert_eq!(cyclotomic(4), p(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), p(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), p(&[1, 0, -1, 0, 1]));
        assert_eq!(root_of_unity_orders(2), alloc::vec![1, 2, 3, 4, 6]);
    }

    #[test]
    fn squarefree() {
        // (x-1)^2 (x+2)
        let f = p(&[-1, 1]).pow(2).mul(&p(&[2, 1]));
        let sf = squarefree_decomposition(&f);
        assert_eq!(sf, alloc::vec![(p(&[2, 1]), 1), (p(&[-1, 1]), 2)]);
    }

    #[test]
    fn factoring() {
        // x^4 - 1 = (x-1)(x+1)(x^2+1)
        let f = factor(&p(&[-1, 0, 0, 0, 1]));
        assert_eq!(f.len(), 3);
        assert!(is_irreducible(&p(&[-1, -1, 0, 1])));
        assert!(is_irreducible(&p(&[1, -3, 1])));
        assert!(!is_irreducible(&p(&[1, -2, 1])));
        // (x^2 - x - 1)(x^2 + x - 1)
        let g = p(&[-1, -1, 1]).mul(&p(&[-1, 1, 1]));
        let fg = factor(&g);
        assert_eq!(fg.len(), 2);
        assert!(fg.iter().all(|(q, m)| q.degree() == 2 && *m == 1));
    }

    #[test]
    fn gcd_and_division() {
        let a = p(&[-1, 1]).mul(&p(&[3, 0, 1]));
        let b = p(&[-1, 1]).mul(&p(&[5, 1]));
        assert_eq!(gcd(&a, &b), p(&[-1, 1]));
        assert!(p(&[3, 0, 1]).divides(&a));
        assert!(!p(&[5, 1]).divides(&a));
    }

    #[test]
    fn cyclotomic_split() {
        // (x^2 + 1)(x^2 - 3x + 1)
        let f = p(&[1, 0, 1]).mul(&p(&[1, -3, 1]));
        let (rest, cyc) = cyclotomic_part(&f);
        assert_eq!(rest, p(&[1, -3, 1]));
        assert_eq!(cyc, alloc::vec![(4, 1)]);
        let _ = f.to_string();
    }
}
