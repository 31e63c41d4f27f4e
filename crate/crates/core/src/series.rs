//! Series data model, train/test splitting, min-max scaling, supervised
//! windowing and CSV ingestion.

use std::io::Read;
use std::ops::Deref;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psr::EmbeddingSpec;

/// A finite, ordered sequence of real observations.
///
/// `origin_index` is the offset of the first value inside the series it was
/// cut from, so test segments keep their position in the full record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    name: String,
    values: Vec<f64>,
    origin_index: usize,
    timestamps: Option<Vec<String>>,
}

impl Series {
    /// Builds a series, rejecting empty input and non-finite values.
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::non_finite(format!(
                "series `{name}` at position {pos}"
            )));
        }
        Ok(Self {
            name,
            values,
            origin_index: 0,
            timestamps: None,
        })
    }

    /// The zero-length series, only produced by operations over empty inputs.
    pub fn empty(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            values: Vec::new(),
            origin_index: 0,
            timestamps: None,
        }
    }

    pub fn with_origin(mut self, origin_index: usize) -> Self {
        self.origin_index = origin_index;
        self
    }

    pub fn with_timestamps(mut self, timestamps: Vec<String>) -> Result<Self> {
        if timestamps.len() != self.values.len() {
            return Err(Error::LengthMismatch {
                actual: self.values.len(),
                predicted: timestamps.len(),
            });
        }
        self.timestamps = Some(timestamps);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn origin_index(&self) -> usize {
        self.origin_index
    }

    pub fn timestamps(&self) -> Option<&[String]> {
        self.timestamps.as_deref()
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Sample standard deviation (n - 1 denominator).
    pub fn std_dev(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn summary(&self) -> Summary {
        Summary {
            count: self.len(),
            mean: self.mean(),
            std: self.std_dev(),
            max: self.max(),
            min: self.min(),
        }
    }
}

impl Deref for Series {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

/// Count, mean, standard deviation, max and min of a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub max: f64,
    pub min: f64,
}

/// Number of trailing samples held out for testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_len: usize,
}

/// Splits off the trailing `test_len` samples.
pub fn split(series: &Series, spec: SplitSpec) -> Result<(Series, Series)> {
    let n = series.len();
    if spec.test_len == 0 {
        return Err(Error::invalid("test_len", "must be positive"));
    }
    if spec.test_len >= n {
        return Err(Error::SplitTooLarge {
            test_len: spec.test_len,
            len: n,
        });
    }
    let cut = n - spec.test_len;
    let piece = |range: std::ops::Range<usize>, suffix: &str| Series {
        name: format!("{}{suffix}", series.name),
        values: series.values[range.clone()].to_vec(),
        origin_index: series.origin_index + range.start,
        timestamps: series.timestamps.as_ref().map(|t| t[range].to_vec()),
    };
    Ok((piece(0..cut, ":train"), piece(cut..n, ":test")))
}

/// Min-max scaling onto [0, 1], fit on training data only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub min: f64,
    pub max: f64,
}

impl Normalizer {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::non_finite("normalizer bounds"));
        }
        if max <= min {
            return Err(Error::DegenerateRange { value: min });
        }
        Ok(Self { min, max })
    }

    pub fn transform(&self, x: f64) -> f64 {
        (x - self.min) / (self.max - self.min)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        y * (self.max - self.min) + self.min
    }

    pub fn transform_all(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.transform(x)).collect()
    }

    pub fn inverse_all(&self, ys: &[f64]) -> Vec<f64> {
        ys.iter().map(|&y| self.inverse(y)).collect()
    }
}

pub fn fit_normalizer(train: &Series) -> Result<Normalizer> {
    if train.len() < 2 {
        return Err(Error::too_short(train.name(), 2, train.len()));
    }
    let (min, max) = (train.min(), train.max());
    if max <= min {
        return Err(Error::DegenerateRange { value: min });
    }
    Normalizer::new(min, max)
}

/// Supervised one-step windows of a series under a delay embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSet {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    pub spec: EmbeddingSpec,
}

impl WindowSet {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn empty(spec: EmbeddingSpec) -> Self {
        Self {
            inputs: Vec::new(),
            targets: Vec::new(),
            spec,
        }
    }

    /// Keeps only the windows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> WindowSet {
        WindowSet {
            inputs: indices.iter().map(|&i| self.inputs[i].clone()).collect(),
            targets: indices.iter().map(|&i| self.targets[i]).collect(),
            spec: self.spec,
        }
    }
}

/// `inputs[i][j] = x[i + j*tau]`, `targets[i] = x[i + (d-1)*tau + 1]`.
pub fn make_windows(values: &[f64], spec: EmbeddingSpec) -> Result<WindowSet> {
    spec.validate()?;
    let span = spec.span();
    if values.len() < span + 1 {
        return Err(Error::too_short("windowed series", span + 1, values.len()));
    }
    let count = values.len() - span;
    let inputs = (0..count).map(|i| spec.gather(values, i)).collect();
    let targets = (0..count).map(|i| values[i + span]).collect();
    Ok(WindowSet {
        inputs,
        targets,
        spec,
    })
}

/// Reads a `timestamp,speed_ms` CSV. Data rows are numbered from 1 in errors.
pub fn read_csv(path: impl AsRef<Path>) -> Result<Series> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".to_string());
    parse_csv(file, &name)
}

pub fn parse_csv<R: Read>(reader: R, name: &str) -> Result<Series> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = match rdr.headers() {
        Ok(h) => h.clone(),
        Err(e) => {
            return Err(Error::Parse {
                row: 0,
                message: e.to_string(),
            })
        }
    };
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyInput);
    }
    if headers.len() != 2 || &headers[0] != "timestamp" || &headers[1] != "speed_ms" {
        return Err(Error::Parse {
            row: 0,
            message: format!(
                "expected header `timestamp,speed_ms`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut values = Vec::new();
    let mut stamps = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(Error::Parse {
                row,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let speed: f64 = record[1].parse().map_err(|_| Error::Parse {
            row,
            message: format!("speed `{}` is not a number", &record[1]),
        })?;
        if !speed.is_finite() {
            return Err(Error::Parse {
                row,
                message: format!("speed `{}` is not finite", &record[1]),
            });
        }
        values.push(speed);
        stamps.push(record[0].to_string());
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let series = Series::new(name, values)?;
    if stamps.iter().all(|s| s.is_empty()) {
        Ok(series)
    } else {
        series.with_timestamps(stamps)
    }
}

/// Writes a series in the ingestion format; blank timestamps when absent.
pub fn to_csv(series: &Series) -> String {
    let mut out = String::from("timestamp,speed_ms\n");
    for (i, v) in series.iter().enumerate() {
        let ts = series.timestamps().map(|t| t[i].as_str()).unwrap_or("");
        out.push_str(&format!("{ts},{v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(values: &[f64]) -> Series {
        Series::new("t", values.to_vec()).unwrap()
    }

    fn emb(dimension: usize, delay: usize) -> EmbeddingSpec {
        EmbeddingSpec { delay, dimension }
    }

    #[test]
    fn split_site_lengths() {
        let site1 = s(&vec![1.0; 3251]);
        let (train, test) = split(&site1, SplitSpec { test_len: 400 }).unwrap();
        assert_eq!((train.len(), test.len()), (2851, 400));
        assert_eq!(test.origin_index(), 2851);

        let site2 = s(&vec![1.0; 2655]);
        let (train, _) = split(&site2, SplitSpec { test_len: 400 }).unwrap();
        assert_eq!(train.len(), 2255);
    }

    #[test]
    fn split_smallest() {
        let (train, test) = split(&s(&[1.0, 2.0, 3.0]), SplitSpec { test_len: 1 }).unwrap();
        assert_eq!(train.values(), &[1.0, 2.0]);
        assert_eq!(test.values(), &[3.0]);
    }

    #[test]
    fn split_too_large() {
        let err = split(&s(&[1.0, 2.0]), SplitSpec { test_len: 2 }).unwrap_err();
        assert!(matches!(err, Error::SplitTooLarge { .. }));
    }

    #[test]
    fn normalizer_midpoint() {
        let n = fit_normalizer(&s(&[0.0, 10.0])).unwrap();
        assert_eq!((n.min, n.max), (0.0, 10.0));
        assert_eq!(n.transform(5.0), 0.5);
    }

    #[test]
    fn normalizer_site1_max_maps_to_one() {
        let n = fit_normalizer(&s(&[0.3115, 8.4, 19.9028])).unwrap();
        assert_eq!(n.transform(19.9028), 1.0);
        assert_eq!(n.transform(0.3115), 0.0);
    }

    #[test]
    fn normalizer_degenerate() {
        assert!(matches!(
            fit_normalizer(&s(&[3.0, 3.0, 3.0])),
            Err(Error::DegenerateRange { .. })
        ));
    }

    #[test]
    fn windows_small_cases() {
        let w = make_windows(&[1.0, 2.0, 3.0, 4.0], emb(2, 1)).unwrap();
        assert_eq!(w.inputs, vec![vec![1.0, 2.0], vec![2.0, 3.0]]);
        assert_eq!(w.targets, vec![3.0, 4.0]);

        let w = make_windows(&[1.0, 2.0, 3.0, 4.0, 5.0], emb(2, 2)).unwrap();
        assert_eq!(w.inputs, vec![vec![1.0, 3.0], vec![2.0, 4.0]]);
        assert_eq!(w.targets, vec![4.0, 5.0]);
    }

    #[test]
    fn windows_too_short() {
        assert!(matches!(
            make_windows(&[1.0, 2.0, 3.0], emb(4, 1)),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Series::new("x", vec![1.0, f64::NAN]).is_err());
        assert!(matches!(Series::new("x", vec![]), Err(Error::EmptyInput)));
    }

    #[test]
    fn csv_parse_and_errors() {
        let ok = "timestamp,speed_ms\n2012-01-01T00:00:00Z,3.5\n,4.25\n";
        let series = parse_csv(ok.as_bytes(), "x").unwrap();
        assert_eq!(series.values(), &[3.5, 4.25]);
        assert_eq!(series.timestamps().unwrap()[1], "");

        let mut bad = String::from("timestamp,speed_ms\n");
        for i in 1..=10 {
            if i == 7 {
                bad.push_str(",abc\n");
            } else {
                bad.push_str(&format!(",{i}.0\n"));
            }
        }
        match parse_csv(bad.as_bytes(), "x") {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 7),
            other => panic!("unexpected {other:?}"),
        }

        let inf = "timestamp,speed_ms\n,1.0\n,inf\n";
        assert!(matches!(
            parse_csv(inf.as_bytes(), "x"),
            Err(Error::Parse { row: 2, .. })
        ));
        assert!(matches!(
            parse_csv("".as_bytes(), "x"),
            Err(Error::EmptyInput)
        ));
        assert!(matches!(
            parse_csv("timestamp,speed_ms\n".as_bytes(), "x"),
            Err(Error::EmptyInput)
        ));
    }

    proptest! {
        #[test]
        fn split_concat_identity(values in prop::collection::vec(-50.0f64..50.0, 2..80), frac in 0.0f64..1.0) {
            let series = s(&values);
            let test_len = 1 + ((values.len() - 1) as f64 * frac) as usize % (values.len() - 1);
            let (train, test) = split(&series, SplitSpec { test_len }).unwrap();
            let joined: Vec<f64> = train.iter().chain(test.iter()).copied().collect();
            prop_assert_eq!(joined, values.clone());
            prop_assert_eq!(test.origin_index(), values.len() - test_len);
        }

        #[test]
        fn normalizer_round_trip(lo in -100.0f64..100.0, width in 1e-3f64..100.0, t in 0.0f64..=1.0) {
            let n = Normalizer::new(lo, lo + width).unwrap();
            let x = lo + t * width;
            let back = n.inverse(n.transform(x));
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1e-300) || (back - x).abs() < 1e-13);
        }

        #[test]
        fn windows_rebuild_series(values in prop::collection::vec(-10.0f64..10.0, 3..60), d in 1usize..5) {
            prop_assume!(values.len() > d);
            let w = make_windows(&values, emb(d, 1)).unwrap();
            prop_assert_eq!(w.len(), values.len() - d);
            // first column followed by the tail of the target chain
            let mut rebuilt: Vec<f64> = w.inputs.iter().map(|x| x[0]).collect();
            rebuilt.extend_from_slice(&w.inputs.last().unwrap()[1..]);
            rebuilt.push(*w.targets.last().unwrap());
            prop_assert_eq!(rebuilt, values);
        }
    }
}
