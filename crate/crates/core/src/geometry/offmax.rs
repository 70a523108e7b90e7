use crate::Scalar;

/// The `(n + 1)`-th largest value, or 0 when there are at most `n` values.
pub fn offmax<T: Scalar>(values: &[T], n: usize) -> T {
    if values.len() <= n {
        return T::zero();
    }
    let mut v = values.to_vec();
    let (_, kth, _) = v.select_nth_unstable_by(n, |a, b| b.partial_cmp(a).unwrap());
    *kth
}

/// Checks `offmax_M^n >= offmax_full^{n + |full| - |M|}` for the sub-multiset `M`
/// (given by indices) and the identity `sum_{s < |full|} offmax^s = sum values`.
pub fn offmax_subset_monotonicity_check<T: Scalar>(values: &[T], subset: &[usize], n: usize) -> bool {
    let sub: Vec<T> = subset.iter().map(|&i| values[i]).collect();
    let shift = n + values.len() - subset.len();
    let mono = offmax(&sub, n) >= offmax(values, shift);
    let total: T = values.iter().copied().sum();
    let telescoped: T = (0..values.len()).map(|s| offmax(values, s)).sum();
    let scale = values.iter().fold(T::one(), |m, v| m.max(v.abs())) * T::from_usize(values.len().max(1)).unwrap();
    let ident = (total - telescoped).abs() <= T::default_eps() * T::c(16.0) * scale;
    mono && ident
}
