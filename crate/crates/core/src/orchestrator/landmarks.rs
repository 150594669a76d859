use crate::ltm::Ltm;
use crate::memory::FieldId;

/// Landmark counts of every action-tagged word, one row per word, over the
/// non-action fields any of them assert. Returns the rows and the columns.
pub fn landmark_matrix(ltm: &Ltm) -> (Vec<Vec<i64>>, Vec<FieldId>) {
    let action = ltm.schema().action_field();
    let tagged: Vec<_> = ltm
        .words()
        .filter(|(_, w)| w.action().is_some())
        .map(|(_, w)| w)
        .collect();
    let mut columns: Vec<FieldId> = tagged
        .iter()
        .flat_map(|w| w.values().keys().copied())
        .filter(|&f| Some(f) != action)
        .collect();
    columns.sort();
    columns.dedup();
    let rows = tagged
        .iter()
        .map(|w| columns.iter().map(|&f| w.read(f).value() as i64).collect())
        .collect();
    (rows, columns)
}

/// Exact integer determinant by fraction-free (Bareiss) elimination.
pub fn determinant(matrix: &[Vec<i64>]) -> Option<i64> {
    let n = matrix.len();
    if matrix.iter().any(|r| r.len() != n) {
        return None;
    }
    if n == 0 {
        return Some(1);
    }
    let mut m: Vec<Vec<i128>> = matrix
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    i64::try_from(sign * m[n - 1][n - 1]).ok()
}
