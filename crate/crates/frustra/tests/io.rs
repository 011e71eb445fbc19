use frustra::io::{
    exponent_lines, read_configurations_csv, read_exponents_csv, read_json, read_rows_csv, write_configurations_csv,
    write_exponents_csv, write_json, write_rows_csv, Envelope, ExponentLine, ROW_HEADER,
};
use frustra::scaling::{extract_exponents, run_sweep, Observable, Row, SweepSpec, Window};
use frustra::solver::enumerate_degenerate_ground_states;
use frustra::{Error, ModelParams, SolverOptions};
use proptest::prelude::*;

fn sweep_rows() -> Vec<Row> {
    let p = ModelParams::unit(0.01, 1.0, 3).unwrap();
    let spec = SweepSpec::around_critical(p, Window::new(1e-3, 1e-2).unwrap(), 2, Observable::ALL.to_vec()).unwrap();
    run_sweep(&spec).unwrap().rows()
}

#[test]
fn rows_round_trip_through_csv() {
    let rows = sweep_rows();
    let mut buf = Vec::new();
    write_rows_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), ROW_HEADER.join(","));
    assert_eq!(text.lines().count(), rows.len() + 1);
    assert_eq!(read_rows_csv(buf.as_slice()).unwrap(), rows);
}

#[test]
fn foreign_header_is_rejected() {
    let text = "g,x,observable,index,value\n1,2,gap,1,3\n";
    assert!(matches!(read_rows_csv(text.as_bytes()), Err(Error::Io(_))));
    let text = format!("{}\n1,2,gap,1,abc\n", ROW_HEADER.join(","));
    assert!(matches!(read_rows_csv(text.as_bytes()), Err(Error::Io(_))));
}

#[test]
fn rows_round_trip_through_json() {
    let rows = sweep_rows();
    let config = serde_json::json!({ "jbar": 0.01, "n_sites": 3 });
    let warnings = vec!["near g_c".to_string()];
    let mut buf = Vec::new();
    write_json(&config, &rows, &warnings, &mut buf).unwrap();
    let env: Envelope<Row> = read_json(buf.as_slice()).unwrap();
    assert_eq!(env.config, config);
    assert_eq!(env.results, rows);
    assert_eq!(env.warnings, warnings);
}

#[test]
fn configurations_round_trip() {
    let p = ModelParams::unit(0.01, 1.0, 5).unwrap();
    let p = p.with_g(1.01 * p.critical_coupling().unwrap()).unwrap();
    let states = enumerate_degenerate_ground_states(&p, &SolverOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_configurations_csv(&states, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("solution,energy,alpha_1,"));
    assert!(header.ends_with("jx_5"));
    assert_eq!(read_configurations_csv(buf.as_slice()).unwrap(), states);
}

#[test]
fn exponent_table_round_trip() {
    let p = ModelParams::unit(0.01, 1.0, 3).unwrap();
    let report = extract_exponents(&p, Window::new(1e-3, 1e-2).unwrap(), 5).unwrap();
    let lines = exponent_lines(&report);
    // two gaps above, one below, photon and squeezing per site, two curvatures
    assert_eq!(lines.len(), 3 + 6 + 2);
    assert_eq!(lines[0].quantity, "gap_mf");
    let mut buf = Vec::new();
    write_exponents_csv(&lines, &mut buf).unwrap();
    assert_eq!(read_exponents_csv(buf.as_slice()).unwrap(), lines);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let render = || {
        let mut buf = Vec::new();
        write_rows_csv(&sweep_rows(), &mut buf).unwrap();
        buf
    };
    assert_eq!(render(), render());
}

proptest! {
    #[test]
    fn floats_survive_text(values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..20)) {
        let lines: Vec<ExponentLine> = values
            .iter()
            .enumerate()
            .map(|(i, v)| ExponentLine {
                quantity: "q".into(),
                index: i,
                exponent: *v,
                prefactor: -v,
                r_squared: v.abs(),
                accepted: i % 2 == 0,
            })
            .collect();
        let mut buf = Vec::new();
        write_exponents_csv(&lines, &mut buf).unwrap();
        prop_assert_eq!(read_exponents_csv(buf.as_slice()).unwrap(), lines);
    }
}
