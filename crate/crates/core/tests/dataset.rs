use std::io::Write as _;
use std::path::Path;

use mtsforecast::dataset::{
    load_csv, load_csv_from_reader, resample_mean, resample_sum, slice_window, write_csv, CsvSchema, DatasetError,
    MissingPolicy, Recipe,
};
use mtsforecast::{ScalingTransform, SeriesMatrix};
use proptest::prelude::*;

fn schema_with_time() -> CsvSchema {
    CsvSchema {
        timestamp_column: Some("time".into()),
        ..CsvSchema::default()
    }
}

#[test]
fn parses_small_wide_file() {
    let m = load_csv_from_reader("a,b\n1,4\n2,5\n3,6\n".as_bytes(), "mem", &CsvSchema::default()).unwrap();
    assert_eq!((m.rows(), m.cols()), (3, 2));
    assert_eq!(m.values(), &[1.0, 4.0, 2.0, 5.0, 3.0, 6.0]);
    assert_eq!(m.series_ids(), &["a", "b"]);
}

#[test]
fn missing_cells_drop_or_fill_columns() {
    let text = "time,a,b,c\nt1,1,,3\nt2,2,5,\nt3,3,6,7\n";
    let m = load_csv_from_reader(text.as_bytes(), "mem", &schema_with_time()).unwrap();
    assert_eq!(m.series_ids(), &["a"]);
    assert_eq!(m.timestamps().unwrap(), &["t1", "t2", "t3"]);
    let filled = CsvSchema {
        missing: MissingPolicy::ForwardFill,
        ..schema_with_time()
    };
    let m = load_csv_from_reader(text.as_bytes(), "mem", &filled).unwrap();
    // b starts missing, so nothing to carry
    assert_eq!(m.series_ids(), &["a", "c"]);
    assert_eq!(m.column(1), vec![3.0, 3.0, 7.0]);
}

#[test]
fn zeros_can_mark_gaps() {
    let text = "a,b\n1,0\n2,5\n";
    let schema = CsvSchema {
        zero_is_missing: true,
        ..CsvSchema::default()
    };
    let m = load_csv_from_reader(text.as_bytes(), "mem", &schema).unwrap();
    assert_eq!(m.series_ids(), &["a"]);
}

#[test]
fn missing_file_names_the_path() {
    let err = load_csv("no/such/file.csv", &CsvSchema::default()).unwrap_err();
    assert!(matches!(err, DatasetError::Io { .. }));
    assert!(err.to_string().contains("no/such/file.csv"));
}

#[test]
fn same_bytes_same_matrix() {
    let text = "x,y\n0.1,2\n0.30000000000000004,1e-300\n";
    let a = load_csv_from_reader(text.as_bytes(), "a", &CsvSchema::default()).unwrap();
    let b = load_csv_from_reader(text.as_bytes(), "b", &CsvSchema::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn write_then_load_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let m = SeriesMatrix::from_rows(&[vec![0.1, 1.0 / 3.0], vec![2.5e-8, -7.0]]).unwrap();
    let path = dir.path().join("m.csv");
    write_csv(&m, &path).unwrap();
    let back = load_csv(&path, &CsvSchema::default()).unwrap();
    assert_eq!(back.values(), m.values());
}

#[test]
fn resample_examples() {
    let m = SeriesMatrix::from_rows(&[vec![1.0], vec![3.0], vec![5.0], vec![7.0]]).unwrap();
    assert_eq!(resample_mean(&m, 2).unwrap().values(), &[2.0, 6.0]);
    assert_eq!(resample_sum(&m, 2).unwrap().values(), &[4.0, 12.0]);
    assert_eq!(resample_mean(&m, 1).unwrap().values(), m.values());
    assert_eq!(resample_sum(&m, 1).unwrap().values(), m.values());
    assert!(resample_mean(&m, 0).is_err());
}

/// Writes `rows` lines of a generated two-series file and returns the text
/// together with the values, so the oracle never touches the loader.
fn scripted_file(rows: usize) -> (String, Vec<[f64; 2]>) {
    let mut text = String::from("time,north,south\n");
    let mut values = Vec::new();
    for r in 0..rows {
        let v = [((r * 37) % 101) as f64 / 4.0, 50.0 + ((r * 13) % 29) as f64];
        text.push_str(&format!("h{r},{},{}\n", v[0], v[1]));
        values.push(v);
    }
    (text, values)
}

#[test]
fn hourly_year_to_daily_means() {
    let (text, values) = scripted_file(365 * 24);
    let m = load_csv_from_reader(text.as_bytes(), "hourly", &schema_with_time()).unwrap();
    let daily = resample_mean(&m, 24).unwrap();
    assert_eq!((daily.rows(), daily.cols()), (365, 2));
    for d in 0..365 {
        for s in 0..2 {
            let want = values[d * 24..(d + 1) * 24].iter().map(|v| v[s]).sum::<f64>() / 24.0;
            assert!((daily.get(d, s) - want).abs() < 1e-12);
        }
    }
    assert_eq!(daily.timestamps().unwrap()[1], "h24");
}

#[test]
fn quarter_hours_to_daily_totals() {
    let (text, values) = scripted_file(96 * 10 + 5);
    let m = load_csv_from_reader(text.as_bytes(), "qh", &schema_with_time()).unwrap();
    let daily = resample_sum(&m, 96).unwrap();
    assert_eq!(daily.rows(), 10);
    for d in 0..10 {
        let want: f64 = values[d * 96..(d + 1) * 96].iter().map(|v| v[1]).sum();
        assert!((daily.get(d, 1) - want).abs() < 1e-9);
    }
}

#[test]
fn window_slicing() {
    let rows: Vec<Vec<f64>> = (1..=100).map(|r| vec![r as f64]).collect();
    let m = SeriesMatrix::from_rows(&rows).unwrap();
    let w = slice_window(&m, 11, 41).unwrap();
    assert_eq!((w.get(0, 0), w.get(40, 0), w.rows()), (11.0, 51.0, 41));
    assert!(slice_window(&m, 61, 41).is_err());
    assert_eq!(slice_window(&m, 1, 100).unwrap(), m);
}

#[test]
fn scaling_examples() {
    let m = SeriesMatrix::from_rows(&[vec![0.0, 4.0], vec![5.0, 4.0], vec![10.0, 4.0]]).unwrap();
    let t = ScalingTransform::fit(m.view());
    assert_eq!((t.mins(), t.maxs()), (&[0.0, 4.0][..], &[10.0, 4.0][..]));
    assert_eq!(t.degenerate_columns(), &[1]);
    assert_eq!(t.apply_rows(m.view()).unwrap(), vec![0.0, 0.0, 0.5, 0.0, 1.0, 0.0]);
    let mut row = [12.0, 9.0];
    t.apply_row(&mut row).unwrap();
    assert_eq!(row, [1.2, 0.0]);
    assert_eq!(t.invert_row(&[0.5, 0.3]).unwrap(), vec![5.0, 4.0]);
}

#[test]
fn us_macro_recipe_prepares() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/recipes/us_macro.json");
    let m = Recipe::from_path(path).unwrap().prepare().unwrap();
    assert_eq!((m.rows(), m.cols()), (203, 12));
    assert_eq!(m.series_ids()[0], "realgdp");
    assert_eq!(m.resolution(), "quarterly");
}

#[test]
fn recipe_resolves_relative_source_and_resamples() {
    let dir = tempfile::tempdir().unwrap();
    let (text, _) = scripted_file(48);
    std::fs::write(dir.path().join("raw.csv"), text).unwrap();
    let mut f = std::fs::File::create(dir.path().join("r.json")).unwrap();
    write!(
        f,
        r#"{{"source_path": "raw.csv", "timestamp_column": "time", "resample": {{"op": "mean", "group_size": 24}}}}"#
    )
    .unwrap();
    let m = Recipe::from_path(dir.path().join("r.json")).unwrap().prepare().unwrap();
    assert_eq!((m.rows(), m.cols()), (2, 2));
    let err = Recipe::from_path(dir.path().join("absent.json")).unwrap_err();
    assert!(err.to_string().contains("absent.json"));
}

proptest! {
    #[test]
    fn scaling_round_trips(rows in prop::collection::vec(prop::collection::vec(-1e3..1e3f64, 3), 2..20)) {
        let m = SeriesMatrix::from_rows(&rows).unwrap();
        let t = ScalingTransform::fit(m.view());
        let scaled = t.apply_rows(m.view()).unwrap();
        for (i, v) in scaled.iter().enumerate() {
            prop_assert!((0.0..=1.0).contains(v));
            let col = i % 3;
            if !t.degenerate_columns().contains(&col) {
                let back = v * (t.maxs()[col] - t.mins()[col]) + t.mins()[col];
                prop_assert!((back - m.values()[i]).abs() <= 1e-9 * (1.0 + m.values()[i].abs()));
            }
        }
        for r in 0..m.rows() {
            let back = t.invert_row(&scaled[r * 3..(r + 1) * 3]).unwrap();
            for (c, b) in back.iter().enumerate() {
                if !t.degenerate_columns().contains(&c) {
                    prop_assert!((b - m.get(r, c)).abs() <= 1e-9 * (1.0 + m.get(r, c).abs()));
                }
            }
        }
    }

    #[test]
    fn resample_preserves_totals(values in prop::collection::vec(-100.0..100.0f64, 16..60), g in 1usize..8) {
        let rows: Vec<Vec<f64>> = values.iter().map(|v| vec![*v]).collect();
        let m = SeriesMatrix::from_rows(&rows).unwrap();
        let s = resample_sum(&m, g).unwrap();
        prop_assert_eq!(s.rows(), values.len() / g);
        let kept: f64 = values[..s.rows() * g].iter().sum();
        prop_assert!((s.values().iter().sum::<f64>() - kept).abs() < 1e-9);
    }
}
