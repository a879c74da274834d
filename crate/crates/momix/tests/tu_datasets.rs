//! Checks against real TU raw files. Ignored unless `TU_DATA_DIR` points at a
//! directory containing `MUTAG/MUTAG_A.txt` and friends:
//!
//! ```text
//! TU_DATA_DIR=/data/tu cargo test -p momix --test tu_datasets -- --ignored
//! ```

use std::path::PathBuf;

use momix::graph::parse_tu_dataset;

fn data_dir(name: &str) -> Option<PathBuf> {
    let root = std::env::var_os("TU_DATA_DIR")?;
    let dir = PathBuf::from(root).join(name);
    dir.is_dir().then_some(dir)
}

#[test]
#[ignore = "needs TU_DATA_DIR with the MUTAG raw files"]
fn mutag_statistics() {
    let dir = data_dir("MUTAG").expect("set TU_DATA_DIR to run this test");
    let (ds, _) = parse_tu_dataset(&dir, "MUTAG").unwrap();
    assert_eq!(ds.len(), 188);
    assert_eq!(ds.class_count, 2);
    let mean_nodes =
        ds.graphs.iter().map(|g| g.node_count()).sum::<usize>() as f64 / ds.len() as f64;
    assert!((mean_nodes - 17.93).abs() < 0.01, "mean nodes {mean_nodes}");
    for g in &ds.graphs {
        let degrees = g.degree_sequence();
        assert_eq!(degrees.iter().sum::<usize>(), 2 * g.edge_count());
    }
}
