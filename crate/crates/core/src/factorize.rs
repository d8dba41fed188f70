//! Block Gaussian factorization `g = S⁻¹ S̃` without pivoting.
//!
//! `S` is block-lower with identity diagonal blocks and `S̃` is block-upper.
//! Block row pivoting would scramble the degree ordering the factors encode,
//! so a singular pivot block is reported as [`Error::SingularLeadingMinor`].

use crate::blockops::BlockMatrix;
use crate::check::{CheckReport, ResidualTracker};
use crate::error::{Error, Result};
use crate::numerics::{Mat, Scalar, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Lower,
    Upper,
}

/// The pair `(S, S̃)` with both triangular inverses cached.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussFactors<S> {
    s: BlockMatrix<S>,
    stilde: BlockMatrix<S>,
    s_inv: BlockMatrix<S>,
    stilde_inv: BlockMatrix<S>,
}

impl<S: Scalar> GaussFactors<S> {
    /// Block-lower unitriangular factor `S`.
    pub fn s(&self) -> &BlockMatrix<S> {
        &self.s
    }

    /// Block-upper factor `S̃`.
    pub fn stilde(&self) -> &BlockMatrix<S> {
        &self.stilde
    }

    pub fn s_inv(&self) -> &BlockMatrix<S> {
        &self.s_inv
    }

    pub fn stilde_inv(&self) -> &BlockMatrix<S> {
        &self.stilde_inv
    }

    /// Number of block rows of the factored truncation.
    pub fn levels(&self) -> usize {
        self.s.block_rows()
    }

    pub fn block_size(&self) -> usize {
        self.s.block_size()
    }

    /// Normalization block `S̃_{ll}`.
    pub fn normalization(&self, l: usize) -> Mat<S> {
        self.stilde.block(l, l)
    }
}

/// Block Doolittle elimination of a square block matrix.
pub fn lu_factorize<S: Scalar>(g: &BlockMatrix<S>) -> Result<GaussFactors<S>> {
    let (l_max, n) = (g.block_rows(), g.block_size());
    if g.block_cols() != l_max {
        return Err(Error::InvalidArgument(format!(
            "moment matrix must be square, got {}x{} blocks",
            l_max,
            g.block_cols()
        )));
    }
    // lower = S⁻¹ (unit block-lower), upper = S̃
    let mut lower = BlockMatrix::identity(n, l_max);
    let mut upper = BlockMatrix::zeros(n, l_max, l_max);
    for k in 0..l_max {
        for j in k..l_max {
            let mut acc = g.block(k, j);
            for p in 0..k {
                acc = acc - &lower.block(k, p).matmul(&upper.block(p, j));
            }
            upper.set_block(k, j, &acc);
        }
        let pivot_inv = upper
            .block(k, k)
            .inverse()
            .map_err(|_| Error::SingularLeadingMinor { level: k })?;
        for i in k + 1..l_max {
            let mut acc = g.block(i, k);
            for p in 0..k {
                acc = acc - &lower.block(i, p).matmul(&upper.block(p, k));
            }
            lower.set_block(i, k, &acc.matmul(&pivot_inv));
        }
    }
    let s = invert_block_triangular(&lower, Orientation::Lower)?;
    let stilde_inv = invert_block_triangular(&upper, Orientation::Upper)?;
    Ok(GaussFactors {
        s,
        stilde: upper,
        s_inv: lower,
        stilde_inv,
    })
}

/// Inverse of a block-triangular matrix by block substitution.
pub fn invert_block_triangular<S: Scalar>(t: &BlockMatrix<S>, orientation: Orientation) -> Result<BlockMatrix<S>> {
    let (l_max, n) = (t.block_rows(), t.block_size());
    if t.block_cols() != l_max {
        return Err(Error::InvalidArgument(
            "triangular inverse needs a square block matrix".into(),
        ));
    }
    for i in 0..l_max {
        for j in 0..l_max {
            let off_side = match orientation {
                Orientation::Lower => j > i,
                Orientation::Upper => j < i,
            };
            if off_side && !t.block(i, j).is_zero() {
                return Err(Error::InvalidArgument(format!(
                    "block ({i},{j}) is nonzero in a {orientation:?}-triangular matrix"
                )));
            }
        }
    }
    let diag_inv: Vec<Mat<S>> = (0..l_max)
        .map(|i| {
            t.block(i, i)
                .inverse()
                .map_err(|_| Error::SingularDiagonalBlock { index: i })
        })
        .collect::<Result<_>>()?;
    let mut x = BlockMatrix::zeros(n, l_max, l_max);
    for j in 0..l_max {
        x.set_block(j, j, &diag_inv[j]);
        match orientation {
            Orientation::Lower => {
                for i in j + 1..l_max {
                    let mut acc = Mat::zeros(n, n);
                    for k in j..i {
                        acc = acc + &t.block(i, k).matmul(&x.block(k, j));
                    }
                    x.set_block(i, j, &(-diag_inv[i].matmul(&acc)));
                }
            }
            Orientation::Upper => {
                for i in (0..j).rev() {
                    let mut acc = Mat::zeros(n, n);
                    for k in i + 1..=j {
                        acc = acc + &t.block(i, k).matmul(&x.block(k, j));
                    }
                    x.set_block(i, j, &(-diag_inv[i].matmul(&acc)));
                }
            }
        }
    }
    Ok(x)
}

/// Factor residuals: `S⁻¹S̃ = g`, `S g S̃⁻¹ = I`, the truncated products
/// `(S^{[l]})⁻¹ S̃^{[l]} = g^{[l]}` and the nested inverses
/// `(S⁻¹)^{[l]} = (S^{[l]})⁻¹`, `(S̃⁻¹)^{[≥l]} = (S̃^{[≥l]})⁻¹`.
pub fn check_factorization<S: Scalar>(
    g: &BlockMatrix<S>,
    f: &GaussFactors<S>,
    tol: Tolerance,
) -> Result<CheckReport<S>> {
    let l_max = g.block_rows();
    let n = g.block_size();
    let mut t = ResidualTracker::new(tol);
    t.record_pair(f.s_inv().matmul(f.stilde()).dense(), g.dense(), || "S⁻¹S̃ − g".into());
    let one = BlockMatrix::identity(n, l_max);
    t.record_pair(f.s().matmul(g).matmul(f.stilde_inv()).dense(), one.dense(), || {
        "S g S̃⁻¹ − I".into()
    });
    t.record_pair(f.s().matmul(f.s_inv()).dense(), one.dense(), || "S S⁻¹ − I".into());
    t.record_pair(f.stilde().matmul(f.stilde_inv()).dense(), one.dense(), || {
        "S̃ S̃⁻¹ − I".into()
    });
    for l in 1..=l_max {
        let s_l_inv = invert_block_triangular(&f.s().leading(l), Orientation::Lower)?;
        t.record_pair(
            s_l_inv.matmul(&f.stilde().leading(l)).dense(),
            g.leading(l).dense(),
            || format!("(S^[{l}])⁻¹ S̃^[{l}] − g^[{l}]"),
        );
        t.record_pair(s_l_inv.dense(), f.s_inv().leading(l).dense(), || {
            format!("(S⁻¹)^[{l}] − (S^[{l}])⁻¹")
        });
        let k = l - 1;
        let tail = invert_block_triangular(&f.stilde().slice(k, l_max, k, l_max), Orientation::Upper)?;
        t.record_pair(tail.dense(), f.stilde_inv().slice(k, l_max, k, l_max).dense(), || {
            format!("(S̃⁻¹)^[≥{k}] − (S̃^[≥{k}])⁻¹")
        });
    }
    Ok(t.finish("factorization"))
}
