use crate::system::MultiIndex;

use super::Check;

/// `r1-k1 = r2-k2 = |R|-n`, `r1+k2 = n` and `r2+k1 = n`.
pub fn check_two_input_identities(n: usize, k: &MultiIndex, r: &MultiIndex) -> bool {
    two_input_checks(n, k, r).iter().all(|c| c.passed)
}

pub fn two_input_checks(n: usize, k: &MultiIndex, r: &MultiIndex) -> Vec<Check> {
    let n = n as i64;
    if k.len() != 2 || r.len() != 2 {
        return vec![Check::new("two components", false, format!("K = {k}, R = {r}"))];
    }
    let d = r.abs() - n;
    vec![
        Check::new(
            "r1-k1 = r2-k2 = |R|-n",
            r[0] - k[0] == d && r[1] - k[1] == d,
            format!("{} , {} , {}", r[0] - k[0], r[1] - k[1], d),
        ),
        Check::new("r1+k2 = n", r[0] + k[1] == n, format!("{} vs {n}", r[0] + k[1])),
        Check::new("r2+k1 = n", r[1] + k[0] == n, format!("{} vs {n}", r[1] + k[0])),
    ]
}

/// Integer identities of the three-input structure, in arranged order.
pub fn three_input_checks(n: usize, k: &MultiIndex, p2: i64, p3: i64, s: i64, r: &MultiIndex) -> Vec<Check> {
    let n = n as i64;
    let d_diff = r.abs() - n;
    let diffs = [r[0] - k[0], r[1] - k[1], r[2] - k[2]];
    let mut sorted = diffs;
    sorted.sort_unstable();
    let s_top = s == r[1] - p2;
    vec![
        Check::new("R >= K", r.dominates(k), format!("R = {r}, K = {k}")),
        Check::new("r2 >= p2, r3 >= p3", r[1] >= p2 && r[2] >= p3, format!("p = ({p2},{p3})")),
        Check::new("d_diff >= 0", d_diff >= 0, format!("d_diff = {d_diff}")),
        Check::new("|R| = n + d_diff", r.abs() == n + d_diff, format!("|R| = {}", r.abs())),
        Check::new("r2-p2 = r3-p3", r[1] - p2 == r[2] - p3, format!("{} vs {}", r[1] - p2, r[2] - p3)),
        Check::new("n = k1+p2+r3", n == k[0] + p2 + r[2], format!("{} vs {n}", k[0] + p2 + r[2])),
        Check::new(
            "d_diff = (r1-k1)+(r2-p2)",
            d_diff == diffs[0] + r[1] - p2,
            format!("{} vs {d_diff}", diffs[0] + r[1] - p2),
        ),
        Check::new(
            "two largest r-k coincide",
            sorted[1] == sorted[2],
            format!("R-K = ({},{},{})", diffs[0], diffs[1], diffs[2]),
        ),
        Check::new(
            "arranged: r1-k1 = r3-k3 >= r2-k2",
            diffs[0] == diffs[2] && diffs[2] >= diffs[1],
            format!("R-K = ({},{},{})", diffs[0], diffs[1], diffs[2]),
        ),
        Check::new("p2+s <= r2", p2 + s <= r[1], format!("{} vs {}", p2 + s, r[1])),
        Check::new("p3+s <= r3", p3 + s <= r[2], format!("{} vs {}", p3 + s, r[2])),
        Check::new(
            "p3+s = r3 iff s = r2-p2",
            (p3 + s == r[2]) == s_top,
            format!("s = {s}, r2-p2 = {}", r[1] - p2),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::IndexRole;

    fn mi(role: IndexRole, v: &[i64]) -> MultiIndex {
        MultiIndex::new(role, v.to_vec()).unwrap()
    }

    #[test]
    fn two_input_arithmetic() {
        assert!(check_two_input_identities(4, &mi(IndexRole::K, &[1, 1]), &mi(IndexRole::R, &[3, 3])));
        assert!(!check_two_input_identities(4, &mi(IndexRole::K, &[1, 2]), &mi(IndexRole::R, &[3, 3])));
    }

    #[test]
    fn academic_identities() {
        let checks = three_input_checks(7, &mi(IndexRole::K, &[1, 1, 1]), 2, 3, 1, &mi(IndexRole::R, &[4, 3, 4]));
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        let bad = three_input_checks(7, &mi(IndexRole::K, &[1, 1, 1]), 2, 3, 1, &mi(IndexRole::R, &[4, 4, 4]));
        assert!(bad.iter().any(|c| !c.passed));
    }
}
