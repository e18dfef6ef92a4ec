use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use special_monoids::homology::{rank_dense, rank_sparse};
use special_monoids::{
    check_boundary_injective, kernel_basis, rank_exact, smith_normal_form, BigInt, IntMatrix,
};

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Determinant by cofactor expansion; the matrices here are at most 5x5.
fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut total = 0;
    for c in 0..n {
        if m[0][c] == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &v)| v).collect())
            .collect();
        let sign = if c % 2 == 0 { 1 } else { -1 };
        total += sign * m[0][c] * det(&minor);
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors as ratios of successive gcds of k x k minors.
fn determinantal_factors(m: &[Vec<i64>]) -> Vec<i128> {
    let (r, c) = (m.len(), m[0].len());
    let mut divisors = vec![1i128];
    for k in 1..=r.min(c) {
        let mut g = 0i128;
        for rows in subsets(r, k) {
            for cols in subsets(c, k) {
                let sub: Vec<Vec<i128>> =
                    rows.iter().map(|&i| cols.iter().map(|&j| m[i][j] as i128).collect()).collect();
                g = gcd(g, det(&sub));
            }
        }
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    divisors.windows(2).map(|w| w[1] / w[0]).collect()
}

fn to_matrix(m: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_dense(
        &m.iter().map(|row| row.iter().map(|&v| BigInt::from(v)).collect()).collect::<Vec<_>>(),
    )
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> Vec<Vec<i64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect()).collect()
}

#[test]
fn smith_matches_determinantal_divisors() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..200 {
        let m = random_matrix(&mut rng, 5, 5, 3);
        let snf = smith_normal_form(&to_matrix(&m));
        let expected: Vec<BigInt> = determinantal_factors(&m).into_iter().map(BigInt::from).collect();
        assert_eq!(snf.diag, expected, "{m:?}");
        assert_eq!(snf.rank, expected.len());
    }
}

#[test]
fn smith_on_rectangular_and_degenerate_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (r, c) in [(2, 5), (5, 2), (3, 4), (1, 1)] {
        for _ in 0..30 {
            let m = random_matrix(&mut rng, r, c, 4);
            let snf = smith_normal_form(&to_matrix(&m));
            let expected: Vec<BigInt> =
                determinantal_factors(&m).into_iter().map(BigInt::from).collect();
            assert_eq!(snf.diag, expected);
        }
    }
    let zero = IntMatrix::zeros(3, 2);
    assert_eq!(smith_normal_form(&zero).rank, 0);
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-4i64..=4, c), r)
    })
}

proptest! {
    #[test]
    fn ranks_agree(m in matrix_strategy()) {
        let a = to_matrix(&m);
        let s = smith_normal_form(&a).rank;
        prop_assert_eq!(rank_exact(&a), s);
        prop_assert_eq!(rank_dense(&a), s);
        prop_assert_eq!(rank_sparse(&a), s);
        prop_assert_eq!(rank_exact(&a.transpose()), s);
    }

    #[test]
    fn kernel_vectors_are_in_the_kernel(m in matrix_strategy()) {
        let a = to_matrix(&m);
        let basis = kernel_basis(&a);
        prop_assert_eq!(basis.len(), a.cols() - rank_exact(&a));
        for v in basis {
            prop_assert!(v.iter().any(|x| !x.is_zero()));
            prop_assert!(a.apply(&v).unwrap().iter().all(|x| x.is_zero()));
        }
    }
}

/// Cycle detection by depth-first search over an undirected multigraph.
fn has_cycle(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for (i, &(u, v)) in edges.iter().enumerate() {
        if u == v {
            return true;
        }
        adj[u].push((v, i));
        adj[v].push((u, i));
    }
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![(s, usize::MAX)];
        while let Some((u, via)) = stack.pop() {
            for &(v, e) in &adj[u] {
                if e == via {
                    continue;
                }
                if seen[v] {
                    return true;
                }
                seen[v] = true;
                stack.push((v, e));
            }
        }
    }
    false
}

proptest! {
    #[test]
    fn boundary_injective_iff_forest(
        n in 1usize..8,
        raw in prop::collection::vec((0usize..8, 0usize..8), 0..9),
    ) {
        let edges: Vec<(usize, usize)> = raw.into_iter().map(|(u, v)| (u % n, v % n)).collect();
        let mut d = IntMatrix::zeros(n, edges.len());
        for (e, &(u, v)) in edges.iter().enumerate() {
            d.add_to(v, e, BigInt::from(1));
            d.add_to(u, e, BigInt::from(-1));
        }
        let rep = check_boundary_injective(&d);
        prop_assert_eq!(rep.verdict.is_proven(), !has_cycle(n, &edges));
        prop_assert_eq!(rep.verdict.is_refuted(), has_cycle(n, &edges));
        if let Some(k) = rep.kernel_vector {
            prop_assert!(d.apply(&k).unwrap().iter().all(|x| x.is_zero()));
            prop_assert!(k.iter().any(|x| x.is_positive() || x.is_negative()));
        }
    }
}
