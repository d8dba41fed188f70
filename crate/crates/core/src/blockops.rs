//! Truncated semi-infinite block matrices: the moment matrix, multigraded
//! shift powers, level partitions and the multigraded-Hankel checker.

use crate::check::{CheckReport, ResidualTracker};
use crate::error::{Error, Result};
use crate::numerics::{Mat, Scalar, Tolerance};
use crate::weights::{MultiIndex, WeightFamily};

/// `block_rows × block_cols` array of `N × N` blocks, stored densely.
///
/// Block indices are 0-based; block `(0, 0)` of a moment matrix is `g₀₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix<S> {
    n: usize,
    brows: usize,
    bcols: usize,
    data: Mat<S>,
}

impl<S: Scalar> BlockMatrix<S> {
    pub fn zeros(n: usize, brows: usize, bcols: usize) -> Self {
        BlockMatrix {
            n,
            brows,
            bcols,
            data: Mat::zeros(n * brows, n * bcols),
        }
    }

    pub fn identity(n: usize, blocks: usize) -> Self {
        BlockMatrix {
            n,
            brows: blocks,
            bcols: blocks,
            data: Mat::identity(n * blocks),
        }
    }

    /// Wraps a dense matrix whose sides are multiples of `n`.
    pub fn from_dense(n: usize, data: Mat<S>) -> Result<Self> {
        if n == 0 || data.rows() % n != 0 || data.cols() % n != 0 {
            return Err(Error::InvalidArgument(format!(
                "{}x{} matrix is not tiled by {n}x{n} blocks",
                data.rows(),
                data.cols()
            )));
        }
        Ok(BlockMatrix {
            n,
            brows: data.rows() / n,
            bcols: data.cols() / n,
            data,
        })
    }

    pub fn from_blocks(n: usize, brows: usize, bcols: usize, mut f: impl FnMut(usize, usize) -> Mat<S>) -> Self {
        let mut m = Self::zeros(n, brows, bcols);
        for i in 0..brows {
            for j in 0..bcols {
                m.set_block(i, j, &f(i, j));
            }
        }
        m
    }

    pub fn block_size(&self) -> usize {
        self.n
    }

    pub fn block_rows(&self) -> usize {
        self.brows
    }

    pub fn block_cols(&self) -> usize {
        self.bcols
    }

    pub fn dense(&self) -> &Mat<S> {
        &self.data
    }

    pub fn into_dense(self) -> Mat<S> {
        self.data
    }

    pub fn block(&self, i: usize, j: usize) -> Mat<S> {
        let n = self.n;
        self.data.submatrix(i * n, (i + 1) * n, j * n, (j + 1) * n)
    }

    pub fn set_block(&mut self, i: usize, j: usize, block: &Mat<S>) {
        assert_eq!((block.rows(), block.cols()), (self.n, self.n), "block shape");
        self.data.set_submatrix(i * self.n, j * self.n, block);
    }

    /// Block rows `r0..r1`, block columns `c0..c1`.
    pub fn slice(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let n = self.n;
        BlockMatrix {
            n,
            brows: r1 - r0,
            bcols: c1 - c0,
            data: self.data.submatrix(r0 * n, r1 * n, c0 * n, c1 * n),
        }
    }

    /// Leading `l × l` block principal submatrix `M^{[l]}`.
    pub fn leading(&self, l: usize) -> Self {
        self.slice(0, l, 0, l)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        BlockMatrix {
            n: self.n,
            brows: self.brows,
            bcols: other.bcols,
            data: self.data.matmul(&other.data),
        }
    }

    /// Block transpose; each block is transposed too.
    pub fn transpose(&self) -> Self {
        BlockMatrix {
            n: self.n,
            brows: self.bcols,
            bcols: self.brows,
            data: self.data.transpose(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        BlockMatrix {
            n: self.n,
            brows: self.brows,
            bcols: self.bcols,
            data: self.data.clone() - &other.data,
        }
    }

    pub fn max_norm(&self) -> S {
        self.data.max_norm()
    }
}

/// `g` cut at level `l` into `g^{[l]}`, `g^{[l,≥l]}`, `g^{[≥l,l]}`, `g^{[≥l]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition<S> {
    pub level: usize,
    pub top_left: BlockMatrix<S>,
    pub top_right: BlockMatrix<S>,
    pub bottom_left: BlockMatrix<S>,
    pub bottom_right: BlockMatrix<S>,
}

impl<S: Scalar> BlockPartition<S> {
    pub fn reassemble(&self) -> BlockMatrix<S> {
        let n = self.top_left.block_size();
        let l = self.level;
        let rows = l + self.bottom_left.block_rows();
        let cols = l + self.top_right.block_cols();
        let mut m = Mat::zeros(rows * n, cols * n);
        m.set_submatrix(0, 0, self.top_left.dense());
        m.set_submatrix(0, l * n, self.top_right.dense());
        m.set_submatrix(l * n, 0, self.bottom_left.dense());
        m.set_submatrix(l * n, l * n, self.bottom_right.dense());
        BlockMatrix::from_dense(n, m).expect("tiles are block aligned")
    }
}

/// Block column vector `e_j` of length `len` with `I_N` in block row `j`.
pub fn unit_block_vector<S: Scalar>(n: usize, len: usize, j: usize) -> BlockMatrix<S> {
    let mut v = BlockMatrix::zeros(n, len, 1);
    v.set_block(j, 0, &Mat::identity(n));
    v
}

/// Moment matrix `g_{ij} = ∫ x^i ρ_j(x) dx` for `0 <= i, j < l_max`.
pub fn build_moment_matrix<S: Scalar>(fam: &WeightFamily<S>, l_max: usize) -> Result<BlockMatrix<S>> {
    fam.validate(l_max)?;
    let n = fam.block_size();
    let mut g = BlockMatrix::zeros(n, l_max, l_max);
    for i in 0..l_max {
        for j in 0..l_max {
            g.set_block(i, j, &fam.moment(i, j)?);
        }
    }
    Ok(g)
}

/// Truncation of `Λ^{n⃗} = Σ_a Λ^{n_a} E_aa`: block `(i, j)` is `Σ_a δ_{j, i+n_a} E_aa`.
pub fn shift_power<S: Scalar>(nvec: &MultiIndex, l_max: usize) -> BlockMatrix<S> {
    let n = nvec.len();
    let mut m = BlockMatrix::zeros(n, l_max, l_max);
    for i in 0..l_max {
        for a in 0..n {
            let j = i + nvec.get(a);
            if j < l_max {
                m.data[(i * n + a, j * n + a)] = S::one();
            }
        }
    }
    m
}

/// Entrywise check of `g_{i+n_a, j, ab} = g_{i, j+m_b, ab}` on the overlap
/// where both sides fall inside the truncation.
pub fn check_multigraded_symmetry<S: Scalar>(
    g: &BlockMatrix<S>,
    nvec: &MultiIndex,
    mvec: &MultiIndex,
    tol: Tolerance,
) -> CheckReport<S> {
    let n = g.block_size();
    let (rows, cols) = (g.block_rows(), g.block_cols());
    let mut t = ResidualTracker::new(tol);
    let at = |bi: usize, bj: usize, a: usize, b: usize| &g.dense()[(bi * n + a, bj * n + b)];
    for i in 0..rows {
        for j in 0..cols {
            for a in 0..n {
                for b in 0..n {
                    let (ish, jsh) = (i + nvec.get(a), j + mvec.get(b));
                    if ish >= rows || jsh >= cols {
                        continue;
                    }
                    let (lhs, rhs) = (at(ish, j, a, b), at(i, jsh, a, b));
                    let scale = if lhs.abs() > rhs.abs() { lhs.abs() } else { rhs.abs() };
                    t.record((lhs.clone() - rhs).abs(), &scale, || {
                        format!(
                            "i={i} j={j} a={a} b={b}: g[{ish},{j}]={} vs g[{i},{jsh}]={}",
                            lhs.render(),
                            rhs.render()
                        )
                    });
                }
            }
        }
    }
    t.finish("symmetry")
}

/// Splits `g` at block level `l`.
pub fn partition<S: Scalar>(g: &BlockMatrix<S>, l: usize) -> Result<BlockPartition<S>> {
    let (rows, cols) = (g.block_rows(), g.block_cols());
    if l > rows || l > cols {
        return Err(Error::IndexOutOfRange(format!(
            "partition level {l} exceeds {rows}x{cols} blocks"
        )));
    }
    Ok(BlockPartition {
        level: l,
        top_left: g.slice(0, l, 0, l),
        top_right: g.slice(0, l, l, cols),
        bottom_left: g.slice(l, rows, 0, l),
        bottom_right: g.slice(l, rows, l, cols),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{ratio, Rational};
    use crate::weights::SeedWeight;

    type Q = Rational;

    fn scalar_bm(rows: Vec<Vec<Q>>) -> BlockMatrix<Q> {
        BlockMatrix::from_dense(1, Mat::from_rows(rows)).unwrap()
    }

    fn ints(rows: &[&[i64]]) -> BlockMatrix<Q> {
        scalar_bm(rows.iter().map(|r| r.iter().map(|&v| ratio(v, 1)).collect()).collect())
    }

    fn legendre() -> WeightFamily<Q> {
        WeightFamily::hankel(vec![vec![SeedWeight::on_unit_interval(vec![ratio(1, 1)])]])
    }

    fn fam12() -> WeightFamily<Q> {
        WeightFamily::scalar(
            1,
            2,
            vec![
                SeedWeight::on_unit_interval(vec![ratio(1, 1)]),
                SeedWeight::on_unit_interval(vec![ratio(0, 1), ratio(0, 1), ratio(1, 1)]),
            ],
        )
        .unwrap()
    }

    fn hilbert(k: usize) -> BlockMatrix<Q> {
        scalar_bm(
            (0..k)
                .map(|i| (0..k).map(|j| ratio(1, (i + j + 1) as i64)).collect())
                .collect(),
        )
    }

    #[test]
    fn moment_matrix_examples() {
        assert_eq!(build_moment_matrix(&legendre(), 3).unwrap(), hilbert(3));
        let g = build_moment_matrix(&fam12(), 3).unwrap();
        let q = |p, d| ratio(p, d);
        let expect = scalar_bm(vec![
            vec![q(1, 1), q(1, 3), q(1, 2)],
            vec![q(1, 2), q(1, 4), q(1, 3)],
            vec![q(1, 3), q(1, 5), q(1, 4)],
        ]);
        assert_eq!(g, expect);
        let g1 = build_moment_matrix(&fam12(), 1).unwrap();
        assert_eq!(g1.block(0, 0)[(0, 0)], q(1, 1));
    }

    #[test]
    fn shift_power_examples() {
        let s: BlockMatrix<Q> = shift_power(&MultiIndex::new(vec![1]).unwrap(), 3);
        assert_eq!(s, ints(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]));
        let s2: BlockMatrix<Q> = shift_power(&MultiIndex::new(vec![2]).unwrap(), 3);
        assert_eq!(s2, ints(&[&[0, 0, 1], &[0, 0, 0], &[0, 0, 0]]));

        let s12: BlockMatrix<Q> = shift_power(&MultiIndex::new(vec![1, 2]).unwrap(), 4);
        let (e11, e22) = (Mat::<Q>::unit(2, 0), Mat::<Q>::unit(2, 1));
        for i in 0..4 {
            for j in 0..4 {
                let expect = if j == i + 1 {
                    e11.clone()
                } else if j == i + 2 {
                    e22.clone()
                } else {
                    Mat::zeros(2, 2)
                };
                assert_eq!(s12.block(i, j), expect, "block ({i},{j})");
            }
        }
    }

    #[test]
    fn symmetry_examples() {
        let g = build_moment_matrix(&fam12(), 6).unwrap();
        let (n1, m2) = (MultiIndex::new(vec![1]).unwrap(), MultiIndex::new(vec![2]).unwrap());
        let r = check_multigraded_symmetry(&g, &n1, &m2, Tolerance::default());
        assert!(r.passed);
        assert!(r.samples > 0);
        assert_eq!(r.max_residual, ratio(0, 1));

        let h = hilbert(6);
        assert!(check_multigraded_symmetry(&h, &n1, &n1, Tolerance::default()).passed);

        let n2 = MultiIndex::new(vec![2]).unwrap();
        let r = check_multigraded_symmetry(&h, &n2, &n1, Tolerance::default());
        assert!(!r.passed);
        let first = r.first_failure.unwrap();
        assert!(first.starts_with("i=0 j=0 a=0 b=0"), "{first}");
        assert!(first.contains("g[2,0]=1/3") && first.contains("g[0,1]=1/2"), "{first}");
    }

    #[test]
    fn partition_examples() {
        let h = hilbert(3);
        let p0 = partition(&h, 0).unwrap();
        assert_eq!(p0.top_left.block_rows(), 0);
        assert_eq!(p0.bottom_right, h);
        let p3 = partition(&h, 3).unwrap();
        assert_eq!(p3.top_left, h);
        assert_eq!(p3.bottom_right.block_rows(), 0);

        let p2 = partition(&h, 2).unwrap();
        let q = |p, d| ratio(p, d);
        assert_eq!(
            p2.top_left,
            scalar_bm(vec![vec![q(1, 1), q(1, 2)], vec![q(1, 2), q(1, 3)]])
        );
        assert_eq!(p2.top_right, scalar_bm(vec![vec![q(1, 3)], vec![q(1, 4)]]));
        assert_eq!(p2.bottom_left, scalar_bm(vec![vec![q(1, 3), q(1, 4)]]));
        assert_eq!(p2.bottom_right, scalar_bm(vec![vec![q(1, 5)]]));
        for l in 0..=3 {
            assert_eq!(partition(&h, l).unwrap().reassemble(), h);
        }
        assert!(partition(&h, 4).is_err());
    }

    #[test]
    fn shift_tail_block_is_sum_of_unit_outer_products() {
        // (Λ^k)^{[l,≥l]} = Σ_{j<k} e_{l−k+j} e_jᵀ for l >= k
        let l_max = 9;
        for k in 1..=3 {
            let s: BlockMatrix<Q> = shift_power(&MultiIndex::new(vec![k]).unwrap(), l_max);
            for l in k..l_max - k {
                let tail = partition(&s, l).unwrap().top_right;
                let mut expect = BlockMatrix::zeros(1, l, l_max - l);
                for j in 0..k {
                    let left: BlockMatrix<Q> = unit_block_vector(1, l, l - k + j);
                    let right: BlockMatrix<Q> = unit_block_vector(1, l_max - l, j);
                    expect =
                        BlockMatrix::from_dense(1, expect.dense().clone() + left.matmul(&right.transpose()).dense())
                            .unwrap();
                }
                assert_eq!(tail, expect, "k={k} l={l}");
            }
        }
    }

    #[test]
    fn unit_vectors_orthonormal() {
        let n = 2;
        for j in 0..3 {
            for k in 0..3 {
                let ej: BlockMatrix<Q> = unit_block_vector(n, 3, j);
                let ek: BlockMatrix<Q> = unit_block_vector(n, 3, k);
                let prod = ej.transpose().matmul(&ek).into_dense();
                let expect = if j == k { Mat::identity(n) } else { Mat::zeros(n, n) };
                assert_eq!(prod, expect);
            }
        }
        let (e0, e1) = (Mat::<Q>::unit(2, 0), Mat::<Q>::unit(2, 1));
        assert_eq!(e0.matmul(&e0), e0);
        assert!(e0.matmul(&e1).is_zero());
    }
}
