//! Mutually orthogonal Latin squares (MOLS).
//!
//! Two order-`d` Latin squares are orthogonal when superimposing them
//! produces all `d²` ordered cell pairs exactly once. Pairs exist for every
//! order except 2 and 6. This module builds them from finite fields
//! (`L_a(i, k) = a·i + k` over GF(q), giving `q − 1` pairwise-orthogonal
//! squares) and composes coprime orders with the MacNeish product.
//!
//! Orders ≡ 2 (mod 4) above 6 do exist but need constructions beyond the
//! MacNeish product; for those the toolkit verifies user-supplied squares
//! instead of generating them.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MolsError {
    #[error("{0} is not a prime power")]
    NotPrimePower(usize),
    #[error("no pair of orthogonal Latin squares of order {0} exists")]
    NoMolsExists(usize),
    #[error("order {0} is not supported by the built-in constructions; supply a verified pair file")]
    UnsupportedOrder(usize),
}

pub type MolsResult<T> = Result<T, MolsError>;

/// A `d × d` array whose every row and column is a permutation of `0..d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinSquare {
    pub order: usize,
    pub cells: Vec<Vec<usize>>,
}

impl LatinSquare {
    pub fn from_cells(cells: Vec<Vec<usize>>) -> Self {
        let order = cells.len();
        Self { order, cells }
    }

    pub fn get(&self, row: usize, col: usize) -> usize {
        self.cells[row][col]
    }
}

/// Two Latin squares of equal order intended to be orthogonal. Construct
/// via the generators in this module or check with [`verify_mols`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MolsPair {
    pub first: LatinSquare,
    pub second: LatinSquare,
}

impl MolsPair {
    pub fn order(&self) -> usize {
        self.first.order
    }
}

/// First violated MOLS property, as an exhaustive-check witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MolsViolation {
    #[error("squares have different orders {0} and {1}")]
    OrderMismatch(usize, usize),
    #[error("square {square} row {row} has shape or range problems")]
    MalformedRow { square: usize, row: usize },
    #[error("square {square} row {row} repeats symbol {symbol}")]
    RowDuplicate { square: usize, row: usize, symbol: usize },
    #[error("square {square} column {col} repeats symbol {symbol}")]
    ColumnDuplicate { square: usize, col: usize, symbol: usize },
    #[error("cell pair ({a}, {b}) appears at both ({r1}, {c1}) and ({r2}, {c2})")]
    DuplicatePair { a: usize, b: usize, r1: usize, c1: usize, r2: usize, c2: usize },
}

/// Exhaustive Latin-and-orthogonality check; `Err` carries the first
/// violation found.
pub fn verify_mols(pair: &MolsPair) -> Result<(), MolsViolation> {
    if pair.first.order != pair.second.order {
        return Err(MolsViolation::OrderMismatch(pair.first.order, pair.second.order));
    }
    for (si, square) in [&pair.first, &pair.second].into_iter().enumerate() {
        check_latin(square, si)?;
    }
    let d = pair.order();
    let mut seen: Vec<Option<(usize, usize)>> = vec![None; d * d];
    for r in 0..d {
        for c in 0..d {
            let a = pair.first.get(r, c);
            let b = pair.second.get(r, c);
            match seen[a * d + b] {
                Some((r1, c1)) => {
                    return Err(MolsViolation::DuplicatePair { a, b, r1, c1, r2: r, c2: c })
                }
                None => seen[a * d + b] = Some((r, c)),
            }
        }
    }
    Ok(())
}

fn check_latin(square: &LatinSquare, si: usize) -> Result<(), MolsViolation> {
    let d = square.order;
    if square.cells.len() != d {
        return Err(MolsViolation::MalformedRow { square: si, row: square.cells.len() });
    }
    for (r, row) in square.cells.iter().enumerate() {
        if row.len() != d || row.iter().any(|&v| v >= d) {
            return Err(MolsViolation::MalformedRow { square: si, row: r });
        }
        let mut seen = vec![false; d];
        for &v in row {
            if seen[v] {
                return Err(MolsViolation::RowDuplicate { square: si, row: r, symbol: v });
            }
            seen[v] = true;
        }
    }
    for c in 0..d {
        let mut seen = vec![false; d];
        for r in 0..d {
            let v = square.get(r, c);
            if seen[v] {
                return Err(MolsViolation::ColumnDuplicate { square: si, col: c, symbol: v });
            }
            seen[v] = true;
        }
    }
    Ok(())
}

/// GF(q) with explicit addition and multiplication tables. Elements are
/// encoded as integers `0..q`; for prime powers `p^m` the element
/// `Σ aᵢ xⁱ` is encoded as `Σ aᵢ pⁱ`.
#[derive(Debug, Clone)]
pub struct FiniteField {
    pub characteristic: usize,
    pub degree: usize,
    pub order: usize,
    pub add: Vec<Vec<usize>>,
    pub mul: Vec<Vec<usize>>,
}

impl FiniteField {
    /// Construct GF(q). For prime powers the reduction polynomial is the
    /// monic irreducible of the right degree with the smallest integer
    /// encoding, so tables are reproducible across runs and platforms.
    pub fn new(q: usize) -> MolsResult<Self> {
        let (p, m) = prime_power_decompose(q).ok_or(MolsError::NotPrimePower(q))?;
        if m == 1 {
            let add = table(q, |a, b| (a + b) % p);
            let mul = table(q, |a, b| (a * b) % p);
            return Ok(Self { characteristic: p, degree: 1, order: q, add, mul });
        }
        let modulus = smallest_irreducible(p, m);
        let add = table(q, |a, b| add_digits(a, b, p));
        let mul = table(q, |a, b| poly_mul_mod(a, b, p, m, &modulus));
        Ok(Self { characteristic: p, degree: m, order: q, add, mul })
    }
}

fn table(q: usize, f: impl Fn(usize, usize) -> usize) -> Vec<Vec<usize>> {
    (0..q).map(|a| (0..q).map(|b| f(a, b)).collect()).collect()
}

fn prime_power_decompose(q: usize) -> Option<(usize, usize)> {
    if q < 2 {
        return None;
    }
    let mut n = q;
    let mut p = 0;
    for cand in 2..=q {
        if n % cand == 0 {
            p = cand;
            break;
        }
    }
    let mut m = 0;
    while n % p == 0 {
        n /= p;
        m += 1;
    }
    if n == 1 {
        Some((p, m))
    } else {
        None
    }
}

// Polynomials over GF(p) encoded base-p, least significant coefficient first.
fn digits(mut x: usize, p: usize) -> Vec<usize> {
    let mut out = Vec::new();
    while x > 0 {
        out.push(x % p);
        x /= p;
    }
    out
}

fn from_digits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn add_digits(a: usize, b: usize, p: usize) -> usize {
    let (da, db) = (digits(a, p), digits(b, p));
    let len = da.len().max(db.len());
    let sum: Vec<usize> = (0..len)
        .map(|i| (da.get(i).copied().unwrap_or(0) + db.get(i).copied().unwrap_or(0)) % p)
        .collect();
    from_digits(&sum, p)
}

/// Multiply two encoded polynomials and reduce modulo `modulus`
/// (coefficient vector of a monic degree-`m` polynomial).
fn poly_mul_mod(a: usize, b: usize, p: usize, m: usize, modulus: &[usize]) -> usize {
    let (da, db) = (digits(a, p), digits(b, p));
    let mut prod = vec![0usize; da.len() + db.len()];
    for (i, &ca) in da.iter().enumerate() {
        for (k, &cb) in db.iter().enumerate() {
            prod[i + k] = (prod[i + k] + ca * cb) % p;
        }
    }
    // reduce: x^m ≡ −(modulus without leading term)
    for deg in (m..prod.len()).rev() {
        let coeff = prod[deg];
        if coeff == 0 {
            continue;
        }
        prod[deg] = 0;
        for i in 0..m {
            let sub = (coeff * modulus[i]) % p;
            prod[deg - m + i] = (prod[deg - m + i] + p - sub) % p;
        }
    }
    prod.truncate(m);
    from_digits(&prod, p)
}

/// Low coefficients of the lexicographically smallest monic irreducible of
/// degree `m` over GF(p) (smallest by integer encoding of the tail).
fn smallest_irreducible(p: usize, m: usize) -> Vec<usize> {
    let q = p.pow(m as u32);
    for tail in 0..q {
        let mut coeffs = digits(tail, p);
        coeffs.resize(m, 0);
        if is_irreducible(&coeffs, p, m) {
            return coeffs;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over GF(p)")
}

/// Trial division by all monic polynomials of degree 1..=m/2, using the
/// plain schoolbook remainder over GF(p).
fn is_irreducible(tail: &[usize], p: usize, m: usize) -> bool {
    let mut poly = tail.to_vec();
    poly.push(1); // monic degree m
    for deg in 1..=m / 2 {
        let count = p.pow(deg as u32);
        for t in 0..count {
            let mut div = digits(t, p);
            div.resize(deg, 0);
            div.push(1); // monic divisor
            if poly_rem_is_zero(&poly, &div, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(poly: &[usize], div: &[usize], p: usize) -> bool {
    let mut rem = poly.to_vec();
    let dd = div.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let shift = rem.len() - 1 - dd;
            for i in 0..=dd {
                let sub = (lead * div[i]) % p;
                rem[shift + i] = (rem[shift + i] + p - sub) % p;
            }
        }
        rem.pop();
        while rem.len() > dd && *rem.last().unwrap() == 0 {
            rem.pop();
        }
    }
    rem.iter().all(|&c| c == 0)
}

/// The `q − 1` squares `L_a(i, k) = a·i + k` over GF(q), pairwise
/// orthogonal for distinct nonzero `a`.
pub fn mols_from_field(field: &FiniteField) -> Vec<LatinSquare> {
    let q = field.order;
    (1..q)
        .map(|a| {
            let cells = (0..q)
                .map(|i| (0..q).map(|k| field.add[field.mul[a][i]][k]).collect())
                .collect();
            LatinSquare::from_cells(cells)
        })
        .collect()
}

/// MacNeish (direct) product: composite-order pair from two orthogonal
/// pairs, re-encoding cell pairs `(x, y)` as `x·order_b + y`.
pub fn macneish_product(a: &MolsPair, b: &MolsPair) -> MolsPair {
    let build = |sa: &LatinSquare, sb: &LatinSquare| {
        let (na, nb) = (sa.order, sb.order);
        let order = na * nb;
        let cells = (0..order)
            .map(|r| {
                (0..order)
                    .map(|c| sa.get(r / nb, c / nb) * nb + sb.get(r % nb, c % nb))
                    .collect()
            })
            .collect();
        LatinSquare::from_cells(cells)
    };
    MolsPair { first: build(&a.first, &b.first), second: build(&a.second, &b.second) }
}

/// An orthogonal pair of order `d`, when one is constructible: directly
/// from GF(d) for prime powers, otherwise by MacNeish product over the
/// prime-power factorization. Orders 2 and 6 have no pair at all; orders
/// ≡ 2 (mod 4) above 6 are out of reach of these constructions.
pub fn mols_pair(d: usize) -> MolsResult<MolsPair> {
    if d == 2 || d == 6 {
        return Err(MolsError::NoMolsExists(d));
    }
    if d < 3 {
        return Err(MolsError::UnsupportedOrder(d));
    }
    if d % 4 == 2 {
        return Err(MolsError::UnsupportedOrder(d));
    }
    if prime_power_decompose(d).is_some() {
        let field = FiniteField::new(d)?;
        let squares = mols_from_field(&field);
        let mut it = squares.into_iter();
        let first = it.next().expect("q - 1 >= 2 for q >= 3");
        let second = it.next().expect("q - 1 >= 2 for q >= 3");
        return Ok(MolsPair { first, second });
    }
    // Composite, not 2 mod 4: every prime-power factor is >= 3, so each
    // factor contributes a pair and the product combines them.
    let mut pair: Option<MolsPair> = None;
    for (p, m) in prime_power_factorization(d) {
        let q = p.pow(m as u32);
        let field = FiniteField::new(q)?;
        let squares = mols_from_field(&field);
        let mut it = squares.into_iter();
        let factor_pair = MolsPair {
            first: it.next().expect("q >= 3"),
            second: it.next().expect("q >= 3"),
        };
        pair = Some(match pair {
            None => factor_pair,
            Some(acc) => macneish_product(&acc, &factor_pair),
        });
    }
    Ok(pair.expect("d >= 3 has at least one prime factor"))
}

fn prime_power_factorization(mut n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut m = 0;
            while n % p == 0 {
                n /= p;
                m += 1;
            }
            out.push((p, m));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
