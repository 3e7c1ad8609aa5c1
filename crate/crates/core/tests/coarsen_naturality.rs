use isoloop::braid::BraidWord;
use isoloop::loops::{apply_word, coarsen, Clustering, LoopClass, LoopError, DEFAULT_WORD_CAP};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Half twist of blocks `b` and `b + 1` (0-based) with all strands parallel. The
/// negative twist undoes the positive one taken from the swapped sizes.
fn cable(sizes: &[usize], b: usize, sign: i32) -> Vec<i32> {
    let s: usize = sizes[..b].iter().sum::<usize>() + 1;
    let (p, q) = if sign > 0 {
        (sizes[b], sizes[b + 1])
    } else {
        (sizes[b + 1], sizes[b])
    };
    let mut w = Vec::new();
    for a in (0..p).rev() {
        for j in 0..q {
            w.push((s + a + j) as i32);
        }
    }
    if sign < 0 {
        w.reverse();
        w.iter_mut().for_each(|l| *l = -*l);
    }
    w
}

fn lift(sizes: &[usize], word: &[i32]) -> Vec<i32> {
    let starts: Vec<usize> = sizes
        .iter()
        .scan(1, |acc, &s| {
            let a = *acc;
            *acc += s;
            Some(a)
        })
        .collect();
    let mut out = Vec::new();
    for &l in word {
        let b = l.unsigned_abs() as usize - 1;
        let block: Vec<i32> = (starts[b]..starts[b] + sizes[b])
            .map(|g| g as i32)
            .collect();
        if l > 0 {
            out.extend(block);
        } else {
            out.extend(block.iter().rev().map(|g| -g));
        }
    }
    out
}

#[test]
fn coarsening_commutes_with_block_braids() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..50 {
        let k = rng.random_range(2..=4);
        let sizes: Vec<usize> = (0..k).map(|_| rng.random_range(1..=3)).collect();
        let n: usize = sizes.iter().sum();
        let cl = Clustering::from_sizes(&sizes).unwrap();

        let coarse: Vec<i32> = (0..rng.random_range(1..6))
            .map(|_| {
                let g = rng.random_range(1..=k) as i32;
                if rng.random_bool(0.5) {
                    g
                } else {
                    -g
                }
            })
            .collect();
        let d = LoopClass::canonical(k, &coarse).unwrap();
        let c = LoopClass::canonical(n, &lift(&sizes, &coarse)).unwrap();
        assert_eq!(coarsen(&c, &cl).unwrap(), d, "case {case}: lift");

        // random mix of intra-block generators and cabled block crossings
        let mut fine = Vec::new();
        let mut induced = Vec::new();
        let mut cur = sizes.clone();
        for _ in 0..rng.random_range(0..6) {
            let sign = if rng.random_bool(0.5) { 1 } else { -1 };
            if rng.random_bool(0.5) {
                let b = rng.random_range(0..k - 1);
                fine.extend(cable(&cur, b, sign));
                induced.push(sign * (b as i32 + 1));
                cur.swap(b, b + 1);
            } else {
                let b = rng.random_range(0..k);
                if cur[b] >= 2 {
                    let s: usize = cur[..b].iter().sum::<usize>() + 1;
                    fine.push(sign * rng.random_range(s..s + cur[b] - 1) as i32);
                }
            }
        }
        let moved = apply_word(&c, &BraidWord::new(n, fine).unwrap(), DEFAULT_WORD_CAP).unwrap();
        let moved_d =
            apply_word(&d, &BraidWord::new(k, induced).unwrap(), DEFAULT_WORD_CAP).unwrap();
        let after = Clustering::from_sizes(&cur).unwrap();
        assert_eq!(
            coarsen(&moved, &after).unwrap(),
            moved_d,
            "case {case}: sizes {sizes:?}"
        );
    }
}

#[test]
fn classes_separating_a_cluster_do_not_coarsen() {
    let cl = Clustering::from_sizes(&[2, 2]).unwrap();
    let c = LoopClass::canonical(4, &[2, 3]).unwrap();
    assert_eq!(coarsen(&c, &cl), Err(LoopError::NotCoarsenable));
}
