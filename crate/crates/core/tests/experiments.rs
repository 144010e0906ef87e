use std::fs;
use std::path::PathBuf;

use halfwave::experiments::{
    probe_csv, read_report_params, run_approximation, run_bootstrap_diagnostic, run_instability,
    run_smoothing, ExperimentConfig, PROBE_HEADER,
};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("halfwave-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

#[test]
fn approximation_sweep_at_desk_scale() {
    let rep = run_approximation(&ExperimentConfig::new(0.4)).unwrap();
    let rows = &rep.report.rows;
    assert_eq!(
        rows.iter().map(|r| r.eps).collect::<Vec<_>>(),
        [0.1, 0.05, 0.025, 0.0125]
    );
    for r in rows {
        assert!(r.failure.is_none());
        assert!(r.triangle_holds(), "eps {}", r.eps);
        assert!(r.relative_transfer() < 0.2, "eps {}", r.eps);
        // the profile-based mode policy leaves the evolved tail near 1e-6, which
        // is what the drift measures
        assert!(
            r.mass_drift < 1e-9,
            "eps {} drift {:e}",
            r.eps,
            r.mass_drift
        );
        assert!(
            r.spectral_tail < 1e-3,
            "eps {} tail {:e}",
            r.eps,
            r.spectral_tail
        );
    }
    for w in rows.windows(2) {
        assert!(w[1].d0 < w[0].d0);
        assert!(w[1].d_sep_closed > 0.5 * rows[0].d_sep_closed);
        assert!(w[1].approx_err[0] < w[0].approx_err[0]);
    }
    let fit = rep.fits[0].as_ref().unwrap();
    assert!(
        fit.slope >= rep.predicted_exponent - 0.1,
        "slope {}",
        fit.slope
    );
    let csv = probe_csv(&rep.probe_rows());
    assert!(csv.starts_with(PROBE_HEADER));
    assert_eq!(csv.lines().count(), 1 + 2 * rows.len());
}

#[test]
fn doubling_the_modes_changes_little() {
    let base = ExperimentConfig {
        eps_list: vec![0.1],
        t_samples: 64,
        ..ExperimentConfig::new(0.4)
    };
    let k = base.modes_for(0.1);
    let fine = ExperimentConfig {
        max_mode: Some(2 * k),
        ..base.clone()
    };
    let a = &run_instability(&base).unwrap().rows[0];
    let b = &run_instability(&fine).unwrap().rows[0];
    assert!((a.d_sep_numeric - b.d_sep_numeric).abs() < 1e-3 * b.d_sep_numeric);
    assert!(b.mass_drift < 1e-12, "{:e}", b.mass_drift);
    assert!(b.spectral_tail < a.spectral_tail);
}

#[test]
fn large_eps_rows_stay_out_of_the_fit() {
    let cfg = ExperimentConfig {
        eps_list: vec![0.5, 0.25, 0.1],
        t_samples: 64,
        ..ExperimentConfig::new(0.4)
    };
    let rep = run_approximation(&cfg).unwrap();
    assert_eq!(rep.report.rows.len(), 3);
    assert_eq!(rep.fits[0].as_ref().unwrap().points.len(), 2);
}

#[test]
fn bootstrap_ratio_is_stable() {
    let cfg = ExperimentConfig {
        eps_list: vec![0.1, 0.05, 0.025],
        ..ExperimentConfig::new(0.3)
    };
    let boot = run_bootstrap_diagnostic(&cfg).unwrap();
    assert!(boot.interpolation_holds(), "{}", boot.interp_max);
    assert!(boot.ratio_stable(), "{}", boot.ratio_spread);
    for series in &boot.report.series {
        assert_eq!(series.column("h_eps").unwrap()[0], 0.0);
    }
}

#[test]
fn outputs_are_reproducible() {
    let cfg = ExperimentConfig {
        eps_list: vec![0.25, 0.125],
        t_samples: 32,
        ..ExperimentConfig::new(0.4)
    };
    let (a, b) = (scratch("a"), scratch("b"));
    run_instability(&cfg).unwrap().write_outputs(&a).unwrap();
    run_instability(&cfg).unwrap().write_outputs(&b).unwrap();
    for name in ["report.csv", "series_0.25.csv", "series_0.125.csv"] {
        let x = fs::read(a.join(name)).unwrap();
        assert_eq!(x, fs::read(b.join(name)).unwrap(), "{name}");
    }
    let report = fs::read_to_string(a.join("report.csv")).unwrap();
    let params = read_report_params(&report).unwrap();
    assert_eq!(params.len(), 2);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["runs"].as_array().unwrap().len(), 2);
    assert!(meta["threads"].as_u64().unwrap() >= 1);
    assert!(meta["runs"][0]["tail_bound"].as_f64().unwrap() <= 1e-16);

    // a row whose amplitude no longer matches its frequencies is rejected
    let mut lines: Vec<String> = report.lines().map(String::from).collect();
    let mut cols: Vec<String> = lines[1].split(',').map(String::from).collect();
    cols[3] = format!("{}", 1.5 * cols[3].parse::<f64>().unwrap());
    lines[1] = cols.join(",");
    assert!(read_report_params(&lines.join("\n")).is_err());
    let _ = fs::remove_dir_all(a);
    let _ = fs::remove_dir_all(b);
}

#[test]
fn smoothing_sweep_decays() {
    let eps: Vec<f64> = (2..=8).map(|j| 2f64.powi(-j)).collect();
    let rep = run_smoothing(0.4, 0.6, &eps, 65).unwrap();
    assert!((rep.predicted_exponent - 0.58).abs() < 1e-12);
    assert!(rep.fit.slope > 0.4, "{}", rep.fit.slope);
    let csv = probe_csv(&rep.probe_rows());
    assert_eq!(csv.lines().count(), 1 + eps.len());
    assert!(csv.lines().nth(1).unwrap().contains(",duhamel_hsigma,"));
}
