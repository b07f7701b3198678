use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CvError;
use crate::dataset::RowRange;

/// The data shapes a model can be tuned with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Matrix case: train on rows `k..L_tr+k-2` with target row `L_tr+k-1`.
    MatrixPairs,
    /// Matrix case, full-window variant: train on the block `k..L_tr+k-1`.
    MatrixFullWindow,
    /// Stack of `(S rows -> next row)` pairs.
    MultiDimWindow,
    /// List of `(S rows -> same S rows shifted by one)` sequence pairs.
    MatrixList,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::MatrixPairs,
        Scheme::MatrixFullWindow,
        Scheme::MultiDimWindow,
        Scheme::MatrixList,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::MatrixPairs => "matrix-pairs",
            Scheme::MatrixFullWindow => "matrix-full-window",
            Scheme::MultiDimWindow => "multi-dim-window",
            Scheme::MatrixList => "matrix-list",
        }
    }

    /// Whether the scheme takes an inner window length `S`.
    pub fn needs_inner(self) -> bool {
        matches!(self, Scheme::MultiDimWindow | Scheme::MatrixList)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = CvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "matrix-pairs" | "pairs" => Ok(Scheme::MatrixPairs),
            "matrix-full-window" | "full-window" => Ok(Scheme::MatrixFullWindow),
            "multi-dim-window" | "multidim" => Ok(Scheme::MultiDimWindow),
            "matrix-list" | "list" => Ok(Scheme::MatrixList),
            other => Err(CvError::InvalidConfig(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Whether the training stack of the windowed schemes follows the validation
/// fold forward (`Rolling`) or stays at rows `1..L_tr` (`Fixed`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StackMode {
    #[default]
    Rolling,
    Fixed,
}

/// Window lengths for one tuning run: `total = train + validation`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub total: usize,
    pub train: usize,
    /// Inner window `S`, only for the windowed schemes.
    pub inner: Option<usize>,
}

impl SplitConfig {
    pub fn new(total: usize, train: usize, inner: Option<usize>) -> Self {
        Self { total, train, inner }
    }

    /// `train = floor(fraction * total)`.
    pub fn from_fraction(total: usize, fraction: f64, inner: Option<usize>) -> Self {
        let train = (fraction * total as f64 + 1e-9).floor() as usize;
        Self::new(total, train, inner)
    }

    /// Number of validation rows and folds, `L - L_tr`.
    pub fn validation(&self) -> usize {
        self.total.saturating_sub(self.train)
    }

    pub fn validate(&self, scheme: Scheme) -> Result<(), CvError> {
        let bad = |msg: String| Err(CvError::InvalidConfig(msg));
        if self.train == 0 {
            return bad("training length must be at least 1".into());
        }
        if self.train >= self.total {
            return bad(format!(
                "training length {} leaves no validation rows in a window of {}",
                self.train, self.total
            ));
        }
        match (scheme.needs_inner(), self.inner) {
            (true, None) => bad(format!("scheme {scheme} needs an inner window length")),
            (true, Some(s)) if s == 0 || s >= self.train => bad(format!(
                "inner window {s} must satisfy 1 <= S < L_tr = {}",
                self.train
            )),
            (false, Some(s)) => bad(format!("scheme {scheme} takes no inner window (got {s})")),
            _ if scheme == Scheme::MatrixPairs && self.train < 2 => {
                bad("matrix-pairs needs L_tr >= 2 for a non-empty training input".into())
            }
            _ => Ok(()),
        }
    }
}

/// Rows a model is trained on for one fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrainingSet {
    Pair { input: RowRange, target: usize },
    Window(RowRange),
    Stack(Vec<(RowRange, usize)>),
    Sequences(Vec<(RowRange, RowRange)>),
}

impl TrainingSet {
    /// Smallest range covering every training row.
    pub fn span(&self) -> RowRange {
        match self {
            TrainingSet::Pair { input, target } => RowRange::new(input.start, *target),
            TrainingSet::Window(r) => *r,
            TrainingSet::Stack(pairs) => RowRange::new(pairs[0].0.start, pairs[pairs.len() - 1].1),
            TrainingSet::Sequences(pairs) => RowRange::new(pairs[0].0.start, pairs[pairs.len() - 1].1.end),
        }
    }

    fn shifted(&self, by: usize) -> Self {
        match self {
            TrainingSet::Pair { input, target } => TrainingSet::Pair {
                input: input.shifted(by),
                target: target + by,
            },
            TrainingSet::Window(r) => TrainingSet::Window(r.shifted(by)),
            TrainingSet::Stack(p) => TrainingSet::Stack(p.iter().map(|(i, t)| (i.shifted(by), t + by)).collect()),
            TrainingSet::Sequences(p) => {
                TrainingSet::Sequences(p.iter().map(|(i, t)| (i.shifted(by), t.shifted(by))).collect())
            }
        }
    }
}

/// One rolling-window fold. `input` is what the fitted model conditions on
/// to forecast `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    /// 1-based fold number `k`.
    pub index: usize,
    pub training: TrainingSet,
    pub input: RowRange,
    pub target: usize,
    /// Input half of the warm-up sequence pair (matrix-list only); its
    /// target half is `input`.
    pub warmup: Option<RowRange>,
}

impl Fold {
    /// Largest row index the fold touches, including its target.
    pub fn last_row(&self) -> usize {
        self.target
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub scheme: Scheme,
    pub config: SplitConfig,
    pub stack: StackMode,
    pub folds: Vec<Fold>,
}

impl FoldPlan {
    pub fn build(scheme: Scheme, config: SplitConfig, stack: StackMode) -> Result<Self, CvError> {
        config.validate(scheme)?;
        let first = first_fold(scheme, &config);
        let folds = (0..config.validation())
            .map(|shift| {
                let training = if stack == StackMode::Fixed && scheme.needs_inner() {
                    first.training.clone()
                } else {
                    first.training.shifted(shift)
                };
                Fold {
                    index: shift + 1,
                    training,
                    input: first.input.shifted(shift),
                    target: first.target + shift,
                    warmup: first.warmup.map(|w| w.shifted(shift)),
                }
            })
            .collect();
        Ok(Self {
            scheme,
            config,
            stack,
            folds,
        })
    }

    /// Training material and input for forecasting the row after a block of
    /// `rows` rows, i.e. fold 1 of the plan with `L_tr = rows`, `L = rows + 1`.
    pub fn final_fold(scheme: Scheme, rows: usize, inner: Option<usize>) -> Result<Fold, CvError> {
        let config = SplitConfig::new(rows + 1, rows, inner);
        config.validate(scheme)?;
        Ok(first_fold(scheme, &config))
    }

    /// One line per fold, 1-based inclusive ranges.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for fold in &self.folds {
            let _ = write!(out, "fold {}: train ", fold.index);
            match &fold.training {
                TrainingSet::Pair { input, target } => {
                    let _ = write!(out, "{input} -> {target}");
                }
                TrainingSet::Window(r) => {
                    let _ = write!(out, "{r}");
                }
                TrainingSet::Stack(pairs) => {
                    let items: Vec<String> = pairs.iter().map(|(i, t)| format!("{i} -> {t}")).collect();
                    out.push_str(&items.join(", "));
                }
                TrainingSet::Sequences(pairs) => {
                    let items: Vec<String> = pairs.iter().map(|(i, t)| format!("{i} -> {t}")).collect();
                    out.push_str(&items.join(", "));
                }
            }
            match fold.warmup {
                Some(w) => {
                    let _ = write!(out, "; warmup {w} -> {}", fold.input);
                }
                None => {
                    let _ = write!(out, "; input {}", fold.input);
                }
            }
            let _ = writeln!(out, "; target {}", fold.target);
        }
        out
    }
}

fn first_fold(scheme: Scheme, cfg: &SplitConfig) -> Fold {
    let t = cfg.train;
    match scheme {
        Scheme::MatrixPairs => Fold {
            index: 1,
            training: TrainingSet::Pair {
                input: RowRange::new(1, t - 1),
                target: t,
            },
            input: RowRange::new(1, t),
            target: t + 1,
            warmup: None,
        },
        Scheme::MatrixFullWindow => Fold {
            index: 1,
            training: TrainingSet::Window(RowRange::new(1, t)),
            input: RowRange::new(1, t),
            target: t + 1,
            warmup: None,
        },
        Scheme::MultiDimWindow => {
            let s = cfg.inner.expect("validated");
            Fold {
                index: 1,
                training: TrainingSet::Stack((1..=t - s).map(|j| (RowRange::new(j, j + s - 1), j + s)).collect()),
                input: RowRange::new(t - s + 1, t),
                target: t + 1,
                warmup: None,
            }
        }
        Scheme::MatrixList => {
            let s = cfg.inner.expect("validated");
            Fold {
                index: 1,
                training: TrainingSet::Sequences(
                    (1..=t - s)
                        .map(|j| (RowRange::new(j, j + s - 1), RowRange::new(j + 1, j + s)))
                        .collect(),
                ),
                input: RowRange::new(t - s + 1, t),
                target: t + 1,
                warmup: Some(RowRange::new(t - s, t - 1)),
            }
        }
    }
}

/// Convenience builders mirroring the four schemes.
pub fn plan_matrix_pairs(cfg: SplitConfig) -> Result<FoldPlan, CvError> {
    FoldPlan::build(Scheme::MatrixPairs, cfg, StackMode::Rolling)
}

pub fn plan_matrix_full_window(cfg: SplitConfig) -> Result<FoldPlan, CvError> {
    FoldPlan::build(Scheme::MatrixFullWindow, cfg, StackMode::Rolling)
}

pub fn plan_multidim_window(cfg: SplitConfig) -> Result<FoldPlan, CvError> {
    FoldPlan::build(Scheme::MultiDimWindow, cfg, StackMode::Rolling)
}

pub fn plan_matrix_list(cfg: SplitConfig) -> Result<FoldPlan, CvError> {
    FoldPlan::build(Scheme::MatrixList, cfg, StackMode::Rolling)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(a: usize, b: usize) -> RowRange {
        RowRange::new(a, b)
    }

    #[test]
    fn matrix_pairs_example() {
        let plan = plan_matrix_pairs(SplitConfig::new(10, 8, None)).unwrap();
        assert_eq!(plan.folds.len(), 2);
        assert_eq!(
            plan.folds[0].training,
            TrainingSet::Pair {
                input: r(1, 7),
                target: 8
            }
        );
        assert_eq!(plan.folds[0].target, 9);
        assert_eq!(
            plan.folds[1].training,
            TrainingSet::Pair {
                input: r(2, 8),
                target: 9
            }
        );
        assert_eq!(plan.folds[1].target, 10);
        assert_eq!(plan_matrix_pairs(SplitConfig::new(5, 4, None)).unwrap().folds.len(), 1);
        assert!(plan_matrix_pairs(SplitConfig::new(5, 1, None)).is_err());
    }

    #[test]
    fn full_window_example() {
        let plan = plan_matrix_full_window(SplitConfig::new(10, 8, None)).unwrap();
        assert_eq!(plan.folds[0].training, TrainingSet::Window(r(1, 8)));
        assert_eq!(plan.folds[1].training, TrainingSet::Window(r(2, 9)));
        assert_eq!((plan.folds[0].target, plan.folds[1].target), (9, 10));
        assert!(plan_matrix_full_window(SplitConfig::new(10, 10, None)).is_err());
    }

    #[test]
    fn multidim_example() {
        let plan = plan_multidim_window(SplitConfig::new(10, 8, Some(3))).unwrap();
        let expected: Vec<(RowRange, usize)> = (1..=5).map(|j| (r(j, j + 2), j + 3)).collect();
        assert_eq!(plan.folds[0].training, TrainingSet::Stack(expected));
        assert_eq!((plan.folds[0].input, plan.folds[0].target), (r(6, 8), 9));
        assert_eq!((plan.folds[1].input, plan.folds[1].target), (r(7, 9), 10));
        let single = plan_multidim_window(SplitConfig::new(10, 8, Some(7))).unwrap();
        assert!(matches!(&single.folds[0].training, TrainingSet::Stack(p) if p.len() == 1));
        assert!(plan_multidim_window(SplitConfig::new(10, 8, Some(8))).is_err());
        assert!(plan_multidim_window(SplitConfig::new(10, 8, None)).is_err());
    }

    #[test]
    fn matrix_list_example() {
        let plan = plan_matrix_list(SplitConfig::new(10, 8, Some(3))).unwrap();
        let expected: Vec<_> = (1..=5).map(|j| (r(j, j + 2), r(j + 1, j + 3))).collect();
        assert_eq!(plan.folds[0].training, TrainingSet::Sequences(expected));
        assert_eq!(plan.folds[0].warmup, Some(r(5, 7)));
        assert_eq!(plan.folds[0].input, r(6, 8));
        assert_eq!(plan.folds[0].target, 9);
        assert_eq!(plan.folds[1].warmup, Some(r(6, 8)));
        assert_eq!(plan.folds[1].target, 10);
        let s1 = plan_matrix_list(SplitConfig::new(10, 8, Some(1))).unwrap();
        assert!(matches!(&s1.folds[0].training, TrainingSet::Sequences(p) if p.len() == 7));
    }

    #[test]
    fn fixed_stack_keeps_training_rows() {
        let plan = FoldPlan::build(Scheme::MultiDimWindow, SplitConfig::new(10, 8, Some(3)), StackMode::Fixed).unwrap();
        assert_eq!(plan.folds[0].training, plan.folds[1].training);
        assert_eq!(plan.folds[1].input, r(7, 9));
    }

    #[test]
    fn dump_format() {
        let plan = plan_matrix_pairs(SplitConfig::new(10, 8, None)).unwrap();
        assert_eq!(
            plan.dump(),
            "fold 1: train 1..7 -> 8; input 1..8; target 9\nfold 2: train 2..8 -> 9; input 2..9; target 10\n"
        );
    }

    #[test]
    fn final_fold_covers_whole_history() {
        let f = FoldPlan::final_fold(Scheme::MatrixFullWindow, 40, None).unwrap();
        assert_eq!((f.training.clone(), f.input, f.target), (TrainingSet::Window(r(1, 40)), r(1, 40), 41));
        let f = FoldPlan::final_fold(Scheme::MatrixList, 40, Some(5)).unwrap();
        assert_eq!(f.training.span(), r(1, 40));
        assert_eq!((f.input, f.target), (r(36, 40), 41));
    }

    #[test]
    fn fractions_floor() {
        let c = SplitConfig::from_fraction(40, 0.8, None);
        assert_eq!((c.train, c.validation()), (32, 8));
        let c = SplitConfig::from_fraction(90, 0.8, None);
        assert_eq!((c.train, c.validation()), (72, 18));
        assert_eq!(SplitConfig::from_fraction(41, 0.8, None).train, 32);
    }

    proptest! {
        #[test]
        fn folds_translate_and_cover_validation_rows(total in 3usize..60, frac in 0.3f64..0.95, s in 1usize..10, pick in 0usize..4) {
            let scheme = Scheme::ALL[pick];
            let mut cfg = SplitConfig::from_fraction(total, frac, None);
            if scheme.needs_inner() { cfg.inner = Some(s); }
            prop_assume!(cfg.validate(scheme).is_ok());
            let plan = FoldPlan::build(scheme, cfg, StackMode::Rolling).unwrap();
            prop_assert_eq!(plan.folds.len(), cfg.validation());
            let targets: Vec<usize> = plan.folds.iter().map(|f| f.target).collect();
            prop_assert_eq!(targets, (cfg.train + 1..=cfg.total).collect::<Vec<_>>());
            let first = &plan.folds[0];
            for (k, fold) in plan.folds.iter().enumerate() {
                prop_assert_eq!(&fold.training, &first.training.shifted(k));
                prop_assert_eq!(fold.input, first.input.shifted(k));
                prop_assert!(fold.training.span().end < fold.target);
                prop_assert!(fold.input.end < fold.target && fold.training.span().start >= 1);
                prop_assert!(fold.target <= cfg.total);
            }
        }
    }
}
