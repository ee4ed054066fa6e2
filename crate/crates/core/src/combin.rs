//! Small combinatorial enumerators shared by the search routines.

/// Calls `f` on every injective tuple of length `r` over `0..n`, in
/// lexicographic order. Stops early when `f` returns `false`.
pub fn for_each_injective(n: usize, r: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    let mut t = vec![0usize; r];
    let mut used = vec![false; n];
    rec_injective(n, 0, &mut t, &mut used, &mut f)
}

fn rec_injective(
    n: usize,
    pos: usize,
    t: &mut Vec<usize>,
    used: &mut Vec<bool>,
    f: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if pos == t.len() {
        return f(t);
    }
    for v in 0..n {
        if used[v] {
            continue;
        }
        used[v] = true;
        t[pos] = v;
        let go = rec_injective(n, pos + 1, t, used, f);
        used[v] = false;
        if !go {
            return false;
        }
    }
    true
}

/// Calls `f` on every strictly increasing tuple of length `r` over `0..n`,
/// in lexicographic order. Stops early when `f` returns `false`.
pub fn for_each_subset(n: usize, r: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if r > n {
        return true;
    }
    let mut t: Vec<usize> = (0..r).collect();
    loop {
        if !f(&t) {
            return false;
        }
        // Advance the rightmost position that still has room.
        let mut i = r;
        while i > 0 && t[i - 1] == n - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return true;
        }
        t[i - 1] += 1;
        for j in i..r {
            t[j] = t[j - 1] + 1;
        }
    }
}

/// All strictly increasing `r`-tuples over `0..n`.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_subset(n, r, |t| {
        out.push(t.to_vec());
        true
    });
    out
}

/// All permutations of `0..r` in lexicographic order.
pub fn permutations(r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_injective(r, r, |p| {
        out.push(p.to_vec());
        true
    });
    out
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let mut c = 0;
        for_each_injective(5, 3, |_| {
            c += 1;
            true
        });
        assert_eq!(c, 60);
        assert_eq!(subsets(5, 3).len(), 10);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(subsets(4, 2)[5], vec![2, 3]);
    }
}
