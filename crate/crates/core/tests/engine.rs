use num_bigint::BigInt;
use proptest::prelude::*;

use sigma_coeffs::checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
use sigma_coeffs::{compute_rectangle, CoeffTable, Error, Index};

fn checkpoint_bytes(table: &CoeffTable) -> Vec<u8> {
    let mut buf = Vec::new();
    Checkpoint::from_table(table).write_to(&mut buf).unwrap();
    buf
}

/// Keeps only rows of weight `<= s`.
fn prefix(cp: &Checkpoint, s: u32) -> Checkpoint {
    Checkpoint {
        rows: cp
            .rows
            .iter()
            .filter(|(i, j, _)| 2 * i + 3 * j <= s)
            .cloned()
            .collect(),
        ..cp.clone()
    }
}

#[test]
fn round_trip_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t21.txt");
    let table = compute_rectangle(20, 20, 2, None).unwrap();
    save_checkpoint(&table, &path).unwrap();
    let loaded = load_checkpoint(&path).unwrap().to_table().unwrap();
    assert_eq!(loaded, table);
    assert_eq!(std::fs::read(&path).unwrap(), checkpoint_bytes(&table));
}

#[test]
fn duplicated_index_in_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.txt");
    std::fs::write(&path, "sigma-coeffs-v1 2 2\n0\t0\t1\n1\t0\t-1\n1\t0\t-1\n").unwrap();
    assert!(matches!(load_checkpoint(&path), Err(Error::Parse { line: 4, .. })));
}

#[test]
fn resume_from_weight_prefix_matches_cold_run() {
    let cold = compute_rectangle(30, 30, 1, None).unwrap();
    let full = Checkpoint::from_table(&cold);
    for s in [0, 1, 7, 60, 149, cold.weight_bound()] {
        let resumed = compute_rectangle(30, 30, 3, Some(&prefix(&full, s))).unwrap();
        assert_eq!(resumed, cold, "prefix through weight {s}");
    }
}

#[test]
fn resume_from_smaller_rectangle() {
    let small = compute_rectangle(10, 5, 1, None).unwrap();
    let grown = compute_rectangle(30, 30, 2, Some(&Checkpoint::from_table(&small))).unwrap();
    assert_eq!(grown, compute_rectangle(30, 30, 1, None).unwrap());
}

#[test]
fn resume_from_partial_diagonal() {
    // A checkpoint that stops in the middle of a diagonal resumes from the
    // last complete one.
    let cold = compute_rectangle(12, 12, 1, None).unwrap();
    let mut cp = prefix(&Checkpoint::from_table(&cold), 30);
    let extra = Checkpoint::from_table(&cold)
        .rows
        .into_iter()
        .find(|(i, j, _)| 2 * i + 3 * j == 31)
        .unwrap();
    cp.rows.push(extra);
    assert_eq!(compute_rectangle(12, 12, 2, Some(&cp)).unwrap(), cold);
}

#[test]
fn resume_rejects_tampered_value() {
    let cold = compute_rectangle(8, 8, 1, None).unwrap();
    let mut cp = Checkpoint::from_table(&cold);
    let row = cp.rows.iter_mut().find(|(i, j, _)| (*i, *j) == (3, 2)).unwrap();
    row.2 += 3;
    assert!(matches!(
        compute_rectangle(8, 8, 1, Some(&cp)),
        Err(Error::CheckpointMismatch { i: 3, j: 2 })
    ));

    let mut cp = Checkpoint::from_table(&cold);
    cp.rows[0].2 = BigInt::from(2);
    assert!(matches!(
        compute_rectangle(8, 8, 1, Some(&cp)),
        Err(Error::CheckpointMismatch { i: 0, j: 0 })
    ));
}

#[test]
fn workers_do_not_change_output() {
    let one = checkpoint_bytes(&compute_rectangle(30, 30, 1, None).unwrap());
    for workers in [2, 4, 7] {
        assert_eq!(
            checkpoint_bytes(&compute_rectangle(30, 30, workers, None).unwrap()),
            one,
            "workers = {workers}"
        );
    }
}

#[test]
fn requested_rectangle_is_prefix_of_larger_one() {
    let big = compute_rectangle(25, 25, 2, None).unwrap();
    let small = compute_rectangle(7, 11, 1, None).unwrap();
    for (idx, v) in small.iter() {
        assert_eq!(big.get(idx), Some(v), "{idx}");
    }
}

#[test]
fn every_entry_is_divisible_as_expected() {
    // Ring membership: 3^j | a[i,j].
    let t = compute_rectangle(40, 40, 2, None).unwrap();
    for idx in t.rectangle() {
        let v = t.get(idx).unwrap();
        let pow = BigInt::from(3).pow(idx.j);
        assert_eq!(v % &pow, BigInt::from(0), "{idx}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn recursion_holds_post_hoc(max_i in 0u32..18, max_j in 0u32..18, workers in 1usize..5) {
        let t = compute_rectangle(max_i, max_j, workers, None).unwrap();
        prop_assert_eq!(t.completed_weight(), Some(t.weight_bound()));
        for (idx, _) in t.iter() {
            prop_assert!(t.satisfies_recursion(idx), "{}", idx);
        }
        prop_assert_eq!(t.coefficient(0, 0).unwrap(), BigInt::from(1));
        prop_assert_eq!(t.coefficient(-1, 2).unwrap(), BigInt::from(0));
    }

    #[test]
    fn checkpoint_text_round_trips(max_i in 0u32..12, max_j in 0u32..12, cut in 0usize..200) {
        let t = compute_rectangle(max_i, max_j, 1, None).unwrap();
        let mut cp = Checkpoint::from_table(&t);
        cp.rows.truncate(cut);
        let mut buf = Vec::new();
        cp.write_to(&mut buf).unwrap();
        let back = Checkpoint::parse(&buf[..]).unwrap();
        prop_assert_eq!(&back, &cp);
        let table = back.to_table().unwrap();
        prop_assert_eq!(table.iter().count(), cp.rows.len());
        for (i, j, v) in &cp.rows {
            prop_assert_eq!(table.get(Index::new(*i, *j)), Some(v));
        }
    }
}
