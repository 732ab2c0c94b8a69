//! Finite U-stable spans of q-expansions and the projector onto the
//! alpha-primary (generalized eigen-) subspace of the U operator, all in
//! exact rational arithmetic.
//!
//! The projector is computed without factoring the full spectrum: with
//! P the characteristic polynomial and P = (x - alpha)^mult * g where
//! g(alpha) != 0, the idempotent is h(U) g(U) where h inverts g modulo
//! (x - alpha)^mult (a truncated power-series inversion around alpha).

use num_traits::{One, Zero};

use crate::bernoulli::zeta_neg;
use crate::qexp::QExpansion;
use crate::rational::{rat_i64, Rational};
use crate::{Error, Result};

pub type Matrix = Vec<Vec<Rational>>;

pub fn mat_identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![Rational::zero(); b[0].len()]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for (j, bkj) in b[k].iter().enumerate() {
                if !bkj.is_zero() {
                    out[i][j] += aik * bkj;
                }
            }
        }
    }
    out
}

pub fn mat_add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn mat_scale(a: &Matrix, c: &Rational) -> Matrix {
    a.iter()
        .map(|r| r.iter().map(|x| x * c).collect())
        .collect()
}

pub fn mat_pow(a: &Matrix, e: u32) -> Matrix {
    let mut acc = mat_identity(a.len());
    for _ in 0..e {
        acc = mat_mul(&acc, a);
    }
    acc
}

fn mat_apply(a: &Matrix, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Exact solve of an overdetermined consistent system; returns None when
/// inconsistent, along with the first inconsistent row index.
fn solve_overdetermined(
    columns: &[Vec<Rational>],
    rhs: &[Rational],
) -> std::result::Result<Vec<Rational>, usize> {
    let cols = columns.len();
    let rows = rhs.len();
    let mut aug: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(rank, p);
        let inv = aug[rank][c].clone();
        for j in c..=cols {
            let v = &aug[rank][j] / &inv;
            aug[rank][j] = v;
        }
        for i in 0..rows {
            if i != rank && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in c..=cols {
                    let t = &f * &aug[rank][j];
                    aug[i][j] -= t;
                }
            }
        }
        rank += 1;
    }
    for i in rank..rows {
        if !aug[i][cols].is_zero() {
            return Err(i);
        }
    }
    // read solution off the reduced rows (free columns, if any, get zero)
    let mut sol = vec![Rational::zero(); cols];
    let mut r = 0;
    for c in 0..cols {
        if r < rank && aug[r][c].is_one() && (0..r).all(|i| aug[i][c].is_zero()) {
            sol[c] = aug[r][cols].clone();
            r += 1;
        }
    }
    Ok(sol)
}

/// A finite U-stable span with the exact matrix of U on its basis
/// (column j holds the basis coordinates of U applied to basis element j).
pub struct USpan {
    basis: Vec<QExpansion<Rational>>,
    p: u64,
    u_matrix: Matrix,
}

impl USpan {
    /// Build the span, deriving the U matrix by re-expressing U of each
    /// basis element in the basis (exactly, from the shared coefficients).
    pub fn new(basis: Vec<QExpansion<Rational>>, p: u64) -> Result<USpan> {
        assert!(!basis.is_empty());
        let dim = basis.len();
        let reduced_q = basis.iter().map(|f| f.precision()).min().unwrap() / p as usize;
        let columns: Vec<Vec<Rational>> = basis
            .iter()
            .map(|f| f.coeffs()[..reduced_q].to_vec())
            .collect();
        let mut u_matrix = vec![vec![Rational::zero(); dim]; dim];
        for (j, f) in basis.iter().enumerate() {
            let uf = f.u_operator(p)?;
            let rhs = &uf.coeffs()[..reduced_q];
            let coords =
                solve_overdetermined(&columns, rhs).map_err(Error::NotInSpan)?;
            for (i, c) in coords.into_iter().enumerate() {
                u_matrix[i][j] = c;
            }
        }
        Ok(USpan { basis, p, u_matrix })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn u_matrix(&self) -> &Matrix {
        &self.u_matrix
    }

    pub fn basis(&self) -> &[QExpansion<Rational>] {
        &self.basis
    }

    /// Exact coordinates of f in the basis.
    pub fn coords_of(&self, f: &QExpansion<Rational>) -> Result<Vec<Rational>> {
        let q = self
            .basis
            .iter()
            .map(|b| b.precision())
            .min()
            .unwrap()
            .min(f.precision());
        let columns: Vec<Vec<Rational>> = self
            .basis
            .iter()
            .map(|b| b.coeffs()[..q].to_vec())
            .collect();
        solve_overdetermined(&columns, &f.coeffs()[..q]).map_err(Error::NotInSpan)
    }

    /// Characteristic polynomial of the U matrix, monic, ascending
    /// coefficients (Faddeev–LeVerrier).
    pub fn charpoly(&self) -> Vec<Rational> {
        let n = self.dim();
        let a = &self.u_matrix;
        let mut m = mat_identity(n);
        let mut desc = vec![Rational::one()];
        for i in 1..=n as i64 {
            let am = mat_mul(a, &m);
            let tr: Rational = (0..n).map(|d| am[d][d].clone()).sum();
            let c = -tr / rat_i64(i);
            m = mat_add(&am, &mat_scale(&mat_identity(n), &c));
            desc.push(c);
        }
        desc.reverse();
        desc
    }

    pub fn is_eigenvalue(&self, alpha: &Rational) -> bool {
        poly_eval(&self.charpoly(), alpha).is_zero()
    }

    /// The idempotent projecting onto the alpha-primary subspace; the zero
    /// matrix when alpha is not an eigenvalue.
    pub fn projector_alpha(&self, alpha: &Rational) -> Matrix {
        let n = self.dim();
        let charpoly = self.charpoly();
        // Taylor coefficients of the charpoly at alpha via synthetic division
        let taylor = taylor_shift(&charpoly, alpha);
        let mult = taylor.iter().take_while(|c| c.is_zero()).count();
        if mult == 0 {
            return vec![vec![Rational::zero(); n]; n];
        }
        // g in the shifted variable s = x - alpha, with g(alpha) = g_s[0] != 0
        let g_s = taylor[mult..].to_vec();
        // h_s * g_s = 1 mod s^mult
        let mut h_s = vec![Rational::zero(); mult];
        h_s[0] = Rational::one() / &g_s[0];
        for i in 1..mult {
            let mut acc = Rational::zero();
            for j in 0..i {
                if let Some(g) = g_s.get(i - j) {
                    acc += &h_s[j] * g;
                }
            }
            h_s[i] = -acc / &g_s[0];
        }
        let g = taylor_unshift(&g_s, alpha);
        let h = taylor_unshift(&h_s, alpha);
        mat_mul(
            &poly_eval_matrix(&h, &self.u_matrix),
            &poly_eval_matrix(&g, &self.u_matrix),
        )
    }

    /// Apply the alpha-primary projector to an element of the span.
    pub fn project(&self, f: &QExpansion<Rational>, alpha: &Rational) -> Result<QExpansion<Rational>> {
        let coords = self.coords_of(f)?;
        let out = mat_apply(&self.projector_alpha(alpha), &coords);
        let q = self.basis.iter().map(|b| b.precision()).min().unwrap();
        let mut result = QExpansion::zero(q);
        for (b, c) in self.basis.iter().zip(&out) {
            result = result.add(&b.map(|_, x| x * c));
        }
        Ok(result)
    }

    /// Commutativity of the projector diagram as a matrix identity:
    /// pi_alpha U^m = (U pi_alpha)^m for all tested m, together with
    /// pi_alpha U = U pi_alpha.
    pub fn diagram_commutes(&self, alpha: &Rational, m_max: u32) -> bool {
        let pi = self.projector_alpha(alpha);
        let u = &self.u_matrix;
        if mat_mul(&pi, u) != mat_mul(u, &pi) {
            return false;
        }
        (1..=m_max).all(|m| {
            mat_mul(&pi, &mat_pow(u, m)) == mat_pow(&mat_mul(u, &pi), m)
        })
    }
}

fn poly_eval(poly: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in poly.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_eval_matrix(poly: &[Rational], a: &Matrix) -> Matrix {
    let n = a.len();
    let mut acc = vec![vec![Rational::zero(); n]; n];
    for c in poly.iter().rev() {
        acc = mat_add(&mat_mul(&acc, a), &mat_scale(&mat_identity(n), c));
    }
    acc
}

/// Coefficients of p(x) rewritten in powers of s = x - alpha, by repeated
/// synthetic division.
fn taylor_shift(poly: &[Rational], alpha: &Rational) -> Vec<Rational> {
    let mut work = poly.to_vec();
    let mut out = Vec::with_capacity(poly.len());
    for _ in 0..poly.len() {
        // divide work by (x - alpha): remainder is the next Taylor coeff
        let mut rem = Rational::zero();
        for c in work.iter_mut().rev() {
            rem = rem * alpha + c.clone();
            *c = rem.clone();
        }
        // after the pass, work[0] holds the remainder and work[1..] the quotient
        out.push(work.remove(0));
        if work.is_empty() {
            break;
        }
    }
    out
}

/// Inverse of [`taylor_shift`]: expand sum c_i (x - alpha)^i in powers of x.
fn taylor_unshift(shifted: &[Rational], alpha: &Rational) -> Vec<Rational> {
    let mut acc: Vec<Rational> = vec![];
    for c in shifted.iter().rev() {
        // acc = acc * (x - alpha) + c
        let mut next = vec![Rational::zero(); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * alpha;
        }
        if next.is_empty() {
            next.push(Rational::zero());
        }
        next[0] += c;
        acc = next;
    }
    acc
}

/// Level-1 Eisenstein expansion zeta(1-k)/2 + sum sigma_{k-1}(n) q^n.
pub fn eisenstein_level1(k: u64, q: usize) -> Result<QExpansion<Rational>> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "level-1 series needs even weight >= 4, got {k}"
        )));
    }
    let mut coeffs = vec![Rational::zero(); q];
    coeffs[0] = zeta_neg(k)? / rat_i64(2);
    for n in 1..q as u64 {
        let sigma: u64 = crate::numtheory::divisors(n)
            .iter()
            .map(|d| d.pow(k as u32 - 1))
            .sum();
        coeffs[n as usize] = rat_i64(sigma as i64);
    }
    Ok(QExpansion::new(coeffs))
}

/// Substitute q -> q^p, keeping the precision.
pub fn dilate(f: &QExpansion<Rational>, p: u64) -> QExpansion<Rational> {
    let q = f.precision();
    let mut coeffs = vec![Rational::zero(); q];
    for n in 0..q {
        if n as u64 % p == 0 {
            coeffs[n] = f.coeff(n / p as usize).clone();
        }
    }
    QExpansion::new(coeffs)
}

/// The two-dimensional span {E_k(q), E_k(q^p)} with its exact U matrix.
pub fn eisenstein_uspan(k: u64, p: u64, q: usize) -> Result<USpan> {
    let f = eisenstein_level1(k, q)?;
    let g = dilate(&f, p);
    USpan::new(vec![f, g], p)
}
