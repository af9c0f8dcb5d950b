mod common;

use std::thread;
use std::time::{Duration, Instant};

use common::*;
use dsarray::runtime::payload;
use dsarray::{Arg, Axis, DistArray, Error, HandleState, Runtime};
use proptest::prelude::*;

/// A pipeline touching every operator family; inputs are small integers so
/// every result is exact regardless of evaluation order.
fn pipeline(workers: usize, x: &Rows, block: (usize, usize), seed: u64) -> Vec<Vec<f64>> {
    let rt = Runtime::new(workers);
    let a = DistArray::from_dense(&rt, x, block).unwrap();
    let t = a.transpose().unwrap();
    let g = a.matmul(&t).unwrap();
    let sq = a.pow(2.0).unwrap().add(&a).unwrap();
    let sh = sq.shuffle_rows(seed).unwrap();
    vec![
        t.collect().unwrap().into_data(),
        sq.sum_axis(Axis::Rows).unwrap().collect().unwrap().into_data(),
        sq.max_axis(Axis::Cols).unwrap().collect().unwrap().into_data(),
        sh.collect().unwrap().into_data(),
        sh.slice_rows(0, x.len().div_ceil(2)).unwrap().collect().unwrap().into_data(),
        g.collect().unwrap().into_data(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn worker_count_does_not_change_results(
        n in 1usize..=24, m in 1usize..=24, pf in 0.0f64..1.0, qf in 0.0f64..1.0, seed in any::<u64>()
    ) {
        let p = 1 + ((n - 1) as f64 * pf) as usize;
        let q = 1 + ((m - 1) as f64 * qf) as usize;
        let x = integer_rows(&mut seeded(seed), n, m);
        let one = pipeline(1, &x, (p, q), seed);
        let eight = pipeline(8, &x, (p, q), seed);
        prop_assert_eq!(one.len(), eight.len());
        for (a, b) in one.iter().zip(&eight) {
            prop_assert!(bits_equal(a, b));
        }
    }

    /// A collection argument behaves as its elements passed one by one.
    #[test]
    fn collection_matches_individual_args(k in 1usize..=8, seed in any::<u64>()) {
        let rt = Runtime::new(4);
        let mut rng = seeded(seed);
        let vals = random_rows(&mut rng, 1, k).remove(0);
        let handles: Vec<_> = vals
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                rt.submit1("leaf", vec![], move |_| {
                    thread::sleep(Duration::from_micros((k - i) as u64 * 50));
                    Ok(payload(v))
                })
                .unwrap()
            })
            .collect();
        let as_coll = rt
            .submit1("sum", vec![Arg::Collection(handles.clone())], |a| {
                Ok(payload(a.many::<f64>(0)?.into_iter().fold(String::new(), |s, v| s + &format!("{v:e};"))))
            })
            .unwrap();
        let as_args = rt
            .submit1("sum", handles.iter().map(Arg::from).collect(), move |a| {
                Ok(payload((0..k).map(|i| a.one::<f64>(i).map(|v| format!("{v:e};"))).collect::<Result<String, _>>()?))
            })
            .unwrap();
        prop_assert_eq!(rt.fetch_as::<String>(&as_coll).unwrap(), rt.fetch_as::<String>(&as_args).unwrap());
    }
}

#[test]
fn submit_returns_before_the_task_runs() {
    let rt = Runtime::new(2);
    let start = Instant::now();
    let h = rt
        .submit1("sleep", vec![], |_| {
            thread::sleep(Duration::from_millis(100));
            Ok(payload(1u8))
        })
        .unwrap();
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_millis(10), "submit took {elapsed:?}");
    assert_ne!(h.state(), HandleState::Ready);
    assert_eq!(*rt.fetch_as::<u8>(&h).unwrap(), 1);
    assert!(start.elapsed() >= Duration::from_millis(100));
}

#[test]
fn failure_reaches_descendants_and_barrier() {
    let rt = Runtime::new(2);
    let bad = rt.submit1("explode", vec![], |_| -> dsarray::Result<_> { panic!("boom") }).unwrap();
    let child = rt.submit1("child", vec![Arg::from(&bad)], |_| Ok(payload(()))).unwrap();
    let ok = rt.submit1("fine", vec![], |_| Ok(payload(2u8))).unwrap();
    match rt.fetch(&child) {
        Err(Error::TaskFailed { op_tag, message }) => {
            assert_eq!(op_tag, "explode");
            assert!(message.contains("boom"));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(*rt.fetch_as::<u8>(&ok).unwrap(), 2);
    assert!(matches!(rt.barrier(), Err(Error::Barrier { .. })));
    rt.barrier().unwrap();
}
