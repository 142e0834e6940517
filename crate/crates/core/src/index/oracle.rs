//! Maximal order of `Q[x]/f` by repeated Round 2 enlargement.
//!
//! Kept deliberately independent of the witness criteria in the parent
//! module: it only uses the ring structure, Hermite normal forms and linear
//! algebra over `F_p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factor, mul_mod, pow_mod};
use crate::error::{Error, Result};
use crate::poly::Cubic;

type V3 = [BigInt; 3];

/// A `Z`-basis `(1, omega, theta)` of an order, as rational coordinates in
/// powers of the root `alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicOrderBasis {
    pub poly: Cubic,
    pub basis: [[BigRational; 3]; 3],
    /// `mult_table[i][j]` holds the coordinates of `b_i * b_j` in the basis.
    pub mult_table: [[[BigRational; 3]; 3]; 3],
    pub disc: i128,
}

impl CubicOrderBasis {
    /// `[O : Z[alpha]]`.
    pub fn index_over_monogenic(&self) -> BigInt {
        let det = &self.basis[0][0] * &self.basis[1][1] * &self.basis[2][2];
        (BigRational::one() / det.abs()).to_integer()
    }

    /// Whether an element given in powers of `alpha` lies in the order.
    pub fn contains(&self, v: &[BigRational; 3]) -> bool {
        solve_triangular(&self.basis, v)
            .iter()
            .all(|c| c.is_integer())
    }
}

// Lower-triangular lattice basis rows / den, in powers of alpha.
#[derive(Clone, Debug)]
struct Lattice {
    rows: [V3; 3],
    den: BigInt,
}

fn zero3() -> V3 {
    [BigInt::zero(), BigInt::zero(), BigInt::zero()]
}

fn mul_alpha(f: &Cubic, u: &V3, v: &V3) -> V3 {
    // Product of two quadratic polynomials in alpha, reduced by
    // alpha^3 = -t alpha^2 - a alpha - b.
    let mut c = vec![BigInt::zero(); 5];
    for i in 0..3 {
        for j in 0..3 {
            c[i + j] += &u[i] * &v[j];
        }
    }
    let (t, a, b) = (BigInt::from(f.t), BigInt::from(f.a), BigInt::from(f.b));
    for k in (3..5).rev() {
        let top = std::mem::take(&mut c[k]);
        c[k - 1] -= &top * &t;
        c[k - 2] -= &top * &a;
        c[k - 3] -= &top * &b;
    }
    [c[0].clone(), c[1].clone(), c[2].clone()]
}

fn hnf(mut gens: Vec<V3>) -> [V3; 3] {
    let mut pivots: [Option<V3>; 3] = [None, None, None];
    for col in (0..3).rev() {
        loop {
            let mut nz: Vec<usize> = (0..gens.len())
                .filter(|&i| !gens[i][col].is_zero())
                .collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by(|&i, &j| gens[i][col].abs().cmp(&gens[j][col].abs()));
            let piv = gens[nz[0]].clone();
            for &i in &nz[1..] {
                let q = gens[i][col].div_floor(&piv[col]);
                for k in 0..3 {
                    let d = &q * &piv[k];
                    gens[i][k] -= d;
                }
            }
        }
        let pos = gens
            .iter()
            .position(|g| !g[col].is_zero())
            .expect("generators span a full-rank lattice");
        let mut row = gens.swap_remove(pos);
        if row[col].is_negative() {
            row.iter_mut().for_each(|x| *x = -&*x);
        }
        pivots[col] = Some(row);
    }
    let mut rows = pivots.map(|r| r.expect("pivot"));
    for c in 0..3 {
        for r in c + 1..3 {
            let q = rows[r][c].div_floor(&rows[c][c]);
            let sub = rows[c].clone();
            for k in 0..3 {
                rows[r][k] -= &q * &sub[k];
            }
        }
    }
    rows
}

impl Lattice {
    fn from_generators(gens: Vec<V3>, den: BigInt) -> Self {
        let rows = hnf(gens);
        let mut g = den.clone();
        for r in &rows {
            for x in r {
                g = g.gcd(x);
            }
        }
        let rows = rows.map(|r| r.map(|x| x / &g));
        Lattice { rows, den: den / g }
    }

    fn basis(&self) -> [[BigRational; 3]; 3] {
        let q = |x: &BigInt| BigRational::new(x.clone(), self.den.clone());
        [0, 1, 2].map(|i| [0, 1, 2].map(|k| q(&self.rows[i][k])))
    }

    // Coordinates of b_i * b_j in the lattice basis.
    fn structure_constants(&self, f: &Cubic) -> [[[BigRational; 3]; 3]; 3] {
        let basis = self.basis();
        let den2 = &self.den * &self.den;
        [0, 1, 2].map(|i| {
            [0, 1, 2].map(|j| {
                let prod = mul_alpha(f, &self.rows[i], &self.rows[j]);
                let v = prod.map(|x| BigRational::new(x, den2.clone()));
                solve_triangular(&basis, &v)
            })
        })
    }

    fn disc(&self, delta: i128) -> BigRational {
        let det = BigRational::new(
            &self.rows[0][0] * &self.rows[1][1] * &self.rows[2][2],
            self.den.pow(3),
        );
        BigRational::from_integer(BigInt::from(delta)) * &det * &det
    }
}

// Coordinates c with v = sum c_i basis_i for a lower-triangular basis.
fn solve_triangular(basis: &[[BigRational; 3]; 3], v: &[BigRational; 3]) -> [BigRational; 3] {
    let c2 = &v[2] / &basis[2][2];
    let c1 = (&v[1] - &c2 * &basis[2][1]) / &basis[1][1];
    let c0 = (&v[0] - &c1 * &basis[1][0] - &c2 * &basis[2][0]) / &basis[0][0];
    [c0, c1, c2]
}

fn to_mod(x: &BigRational, p: u64) -> u64 {
    debug_assert!(x.is_integer());
    x.to_integer()
        .mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits")
}

/// Basis of `{x in F_p^n : sum_i x_i rows_i = 0}`.
fn left_kernel(rows: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    // Transpose: solve A x = 0 with A = rows^T (m x n).
    let mut a: Vec<Vec<u64>> = (0..m)
        .map(|j| (0..n).map(|i| rows[i][j] % p).collect())
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(pr) = (r..m).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pr);
        let inv = pow_mod(a[r][c], p - 2, p);
        for k in 0..n {
            a[r][k] = mul_mod(a[r][k], inv, p);
        }
        for i in 0..m {
            if i != r && a[i][c] != 0 {
                let fac = a[i][c];
                for k in 0..n {
                    let sub = mul_mod(fac, a[r][k], p);
                    a[i][k] = (a[i][k] + p - sub) % p;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut x = vec![0u64; n];
            x[fc] = 1;
            for (row, &pc) in pivot_cols.iter().enumerate() {
                x[pc] = (p - a[row][fc]) % p;
            }
            x
        })
        .collect()
}

fn alg_mul(c: &[[[u64; 3]; 3]; 3], x: &[u64; 3], y: &[u64; 3], p: u64) -> [u64; 3] {
    let mut out = [0u64; 3];
    for i in 0..3 {
        for j in 0..3 {
            let s = mul_mod(x[i], y[j], p);
            if s == 0 {
                continue;
            }
            for k in 0..3 {
                out[k] = (out[k] + mul_mod(s, c[i][j][k], p)) % p;
            }
        }
    }
    out
}

fn alg_pow(c: &[[[u64; 3]; 3]; 3], x: &[u64; 3], mut e: u64, one: &[u64; 3], p: u64) -> [u64; 3] {
    let mut acc = *one;
    let mut base = *x;
    while e > 0 {
        if e & 1 == 1 {
            acc = alg_mul(c, &acc, &base, p);
        }
        base = alg_mul(c, &base, &base, p);
        e >>= 1;
    }
    acc
}

// One enlargement: the multiplier ring of the p-radical, or None when the
// order is already p-maximal.
fn round2_step(f: &Cubic, l: &Lattice, p: u64) -> Option<Lattice> {
    let sc = l.structure_constants(f);
    let cp: [[[u64; 3]; 3]; 3] =
        [0, 1, 2].map(|i| [0, 1, 2].map(|j| [0, 1, 2].map(|k| to_mod(&sc[i][j][k], p))));
    let one_coords = solve_triangular(
        &l.basis(),
        &[BigRational::one(), BigRational::zero(), BigRational::zero()],
    );
    let one = [0, 1, 2].map(|k| to_mod(&one_coords[k], p));
    let mut q = p;
    while q < 3 {
        q *= p;
    }
    let frob: Vec<Vec<u64>> = (0..3)
        .map(|i| {
            let mut e = [0u64; 3];
            e[i] = 1;
            alg_pow(&cp, &e, q, &one, p).to_vec()
        })
        .collect();
    let radical = left_kernel(&frob, p);

    // The ideal I = pL + radical, in lattice coordinates.
    let pb = BigInt::from(p);
    let mut gens: Vec<V3> = (0..3)
        .map(|i| {
            let mut v = zero3();
            v[i] = pb.clone();
            v
        })
        .collect();
    gens.extend(
        radical
            .iter()
            .map(|r| [0, 1, 2].map(|k| BigInt::from(r[k]))),
    );
    let ideal = hnf(gens);
    let ideal_q: [[BigRational; 3]; 3] = ideal.clone().map(|r| r.map(BigRational::from_integer));

    // y in L/pL with y * u in pI for every basis element u of I.
    let rows: Vec<Vec<u64>> = (0..3)
        .map(|i| {
            let mut row = Vec::with_capacity(9);
            for u in &ideal {
                let mut prod = [
                    BigRational::zero(),
                    BigRational::zero(),
                    BigRational::zero(),
                ];
                for (k, uk) in u.iter().enumerate() {
                    if uk.is_zero() {
                        continue;
                    }
                    let uk = BigRational::from_integer(uk.clone());
                    for (m, pm) in prod.iter_mut().enumerate() {
                        *pm += &uk * &sc[i][k][m];
                    }
                }
                let z = solve_triangular(&ideal_q, &prod);
                row.extend(z.iter().map(|x| to_mod(x, p)));
            }
            row
        })
        .collect();
    let kernel = left_kernel(&rows, p);
    if kernel.is_empty() {
        return None;
    }
    let mut new_gens: Vec<V3> = l.rows.iter().map(|r| r.clone().map(|x| x * &pb)).collect();
    for y in &kernel {
        let mut v = zero3();
        for (i, &yi) in y.iter().enumerate() {
            for k in 0..3 {
                v[k] += BigInt::from(yi) * &l.rows[i][k];
            }
        }
        new_gens.push(v);
    }
    Some(Lattice::from_generators(new_gens, &l.den * &pb))
}

/// Maximal order of `Q[x]/f` for an irreducible monic cubic.
pub fn maximal_order_oracle(f: &Cubic) -> Result<CubicOrderBasis> {
    let delta = f.discriminant()?;
    if delta == 0 {
        return Err(Error::ZeroDiscriminant);
    }
    if !f.is_irreducible() {
        return Err(Error::Reducible {
            t: f.t,
            a: f.a,
            b: f.b,
        });
    }
    let id = |i: usize| {
        let mut v = zero3();
        v[i] = BigInt::one();
        v
    };
    let mut lat = Lattice {
        rows: [id(0), id(1), id(2)],
        den: BigInt::one(),
    };
    for (p, e) in factor(delta.unsigned_abs())? {
        if e < 2 {
            continue;
        }
        while let Some(next) = round2_step(f, &lat, p) {
            lat = next;
        }
    }
    let disc = lat.disc(delta);
    if !disc.is_integer() {
        return Err(Error::Precision(
            "order discriminant is not integral".into(),
        ));
    }
    let disc = disc
        .to_integer()
        .to_i128()
        .ok_or(Error::Overflow("order discriminant"))?;
    Ok(CubicOrderBasis {
        poly: *f,
        basis: lat.basis(),
        mult_table: lat.structure_constants(f),
        disc,
    })
}
