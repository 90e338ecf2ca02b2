use std::collections::HashMap;
use std::fs;
use std::path::Path;

use landscape_idos::io::pipeline::{
    run_pipeline, CONSTANTS_CSV, CURVES_CSV, CURVES_SVG, MANIFEST, RATIO_CSV, SCALING_CSV,
};
use landscape_idos::io::{parse_config, tables, RunConfig};

const CSVS: [&str; 4] = [CURVES_CSV, CONSTANTS_CSV, SCALING_CSV, RATIO_CSV];

fn smoke_config(dir: &Path) -> RunConfig {
    parse_config(&format!(
        "dimension = 1\nside = 100\nkind = binary\nvmax = 1\nrealizations = 2\nbase_seed = 42\n\
         grid_points = 120\noutput_dir = {}\nworkers = 1\n",
        dir.display()
    ))
    .unwrap()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

fn read_all(dir: &Path) -> Vec<Vec<u8>> {
    CSVS.iter().map(|f| fs::read(dir.join(f)).unwrap()).collect()
}

#[test]
fn smoke_run_writes_schema_valid_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let config = smoke_config(tmp.path());
    let out = run_pipeline(&config, false).unwrap();
    let dir = tmp.path();
    assert_eq!(header(&dir.join(CURVES_CSV)), "energy,n_mean,n_std,nu_mean,nu_std");
    assert_eq!(header(&dir.join(CONSTANTS_CSV)), "name,value,reciprocal,err2sigma");
    assert_eq!(header(&dir.join(SCALING_CSV)), "curve,slope,intercept,r2,c5_eff,c6_eff");
    assert_eq!(header(&dir.join(RATIO_CSV)), "energy,ratio");

    let constants = tables::read_constants(&dir.join(CONSTANTS_CSV)).unwrap();
    let names: Vec<&str> = constants.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(names, ["C4", "C5", "C5_fit", "C6"]);
    assert_eq!(tables::read_ratio(&dir.join(RATIO_CSV)).unwrap(), out.ratio);
    assert!(out.files.iter().all(|f| f.exists()));
}

#[test]
fn curves_round_trip_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_pipeline(&smoke_config(tmp.path()), false).unwrap();
    let table = tables::read_curves(&tmp.path().join(CURVES_CSV)).unwrap();
    assert_eq!(table.idos.grid.values(), out.run.grid.values());
    assert_eq!(table.idos.mean, out.run.idos.mean);
    assert_eq!(table.idos.std, out.run.idos.std);
    assert_eq!(table.landscape_law.mean, out.run.landscape_law.mean);
    assert_eq!(table.landscape_law.std, out.run.landscape_law.std);
}

#[test]
fn rerun_and_manifest_replay_are_bit_identical() {
    let first = tempfile::tempdir().unwrap();
    run_pipeline(&smoke_config(first.path()), false).unwrap();
    let reference = read_all(first.path());

    let second = tempfile::tempdir().unwrap();
    run_pipeline(&smoke_config(second.path()), false).unwrap();
    assert_eq!(read_all(second.path()), reference);

    let manifest = fs::read_to_string(first.path().join(MANIFEST)).unwrap();
    let mut replay = parse_config(&manifest).unwrap();
    assert_eq!(replay, smoke_config(first.path()));
    let third = tempfile::tempdir().unwrap();
    replay.output_dir = third.path().to_path_buf();
    run_pipeline(&replay, false).unwrap();
    assert_eq!(read_all(third.path()), reference);
}

fn polylines(svg: &str) -> Vec<HashMap<String, f64>> {
    svg.split("points=\"")
        .skip(1)
        .map(|chunk| {
            chunk[..chunk.find('"').unwrap()]
                .split(' ')
                .map(|p| {
                    let (x, y) = p.split_once(',').unwrap();
                    (x.to_string(), y.parse().unwrap())
                })
                .collect()
        })
        .collect()
}

#[test]
fn chart_draws_landscape_law_above_idos() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_pipeline(&smoke_config(tmp.path()), false).unwrap();
    let lines = polylines(&fs::read_to_string(tmp.path().join(CURVES_SVG)).unwrap());
    assert_eq!(lines.len(), 2);
    let (n, nu) = (&lines[0], &lines[1]);
    let shared: Vec<&String> = n.keys().filter(|x| nu.contains_key(*x)).collect();
    assert!(!shared.is_empty());
    let window_hi = out.constants.window.e_max;
    for (k, &e) in out.run.grid.values().iter().enumerate() {
        if e <= window_hi && out.run.idos.mean[k] > 0.0 {
            assert!(out.run.landscape_law.mean[k] >= out.run.idos.mean[k]);
        }
    }
    let below = shared.iter().filter(|x| nu[**x] > n[**x] + 1e-9).count();
    assert_eq!(below, 0);
}
