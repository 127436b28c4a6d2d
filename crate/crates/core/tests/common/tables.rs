//! Published reference numbers: label accuracy per (KB, task), the per-KB
//! normalized confusion blocks, task sizes, and mean max BM25 / evidence
//! scores. Task order everywhere is FEVER, SciFact, Climate, Presidential,
//! Real-World, Fool Me Twice.

pub const TASKS: [&str; 6] = [
    "FEVER",
    "SciFact",
    "Climate",
    "Presidential",
    "Real-World",
    "FMT",
];
pub const KBS: [&str; 4] = ["Wikipedia", "Science", "NYT", "Google"];

/// Claims per task.
pub const TASK_SIZES: [u64; 6] = [2000, 300, 1381, 70, 930, 1169];

/// Label accuracy (percent) per KB row.
pub const ACCURACY: [[f64; 6]; 4] = [
    [74.0, 39.0, 43.0, 1.0, 38.0, 24.0],
    [47.0, 60.0, 45.0, 1.0, 31.0, 9.0],
    [55.0, 39.0, 43.0, 10.0, 36.0, 16.0],
    [72.0, 50.0, 36.0, 26.0, 61.0, 40.0],
];

/// Mean max BM25 for the three indexed KBs.
pub const MEAN_MAX_BM25: [[f64; 6]; 3] = [
    [16.7, 22.6, 21.8, 19.5, 15.5, 18.5],
    [16.7, 27.2, 24.1, 25.0, 16.7, 21.2],
    [13.1, 19.0, 22.7, 17.8, 12.1, 15.8],
];

/// Mean max evidence score for all four KBs.
pub const MEAN_MAX_E: [[f64; 6]; 4] = [
    [0.55, 0.16, 0.24, 0.17, 0.46, 0.4],
    [0.09, 0.54, 0.33, 0.18, 0.22, 0.11],
    [0.18, 0.1, 0.33, 0.49, 0.37, 0.17],
    [0.57, 0.41, 0.02, 0.59, 0.55, 0.55],
];

/// The averaged single-KB confusion matrix, rounded.
pub const AVERAGED_CONFUSION: [[f64; 3]; 3] =
    [[16.0, 1.0, 27.0], [2.0, 10.0, 20.0], [3.0, 2.0, 19.0]];

/// Bootstrapped FEVER / Wikipedia accuracy: mean and half width.
pub const FEVER_WIKI_BOOTSTRAP: (f64, f64) = (74.21, 1.95);

/// Normalized confusion blocks as printed: three rows per KB, each row laying
/// the six tasks' gold rows side by side.
const BLOCK_ROWS: [[u8; 18]; 12] = [
    [28, 1, 5, 3, 1, 37, 5, 1, 42, 0, 0, 31, 21, 3, 33, 14, 3, 34],
    [2, 22, 9, 1, 3, 18, 1, 5, 12, 4, 1, 63, 4, 8, 17, 3, 10, 36],
    [6, 4, 24, 3, 1, 33, 1, 1, 32, 0, 0, 0, 3, 2, 9, 0, 0, 0],
    [8, 1, 25, 26, 2, 13, 9, 1, 37, 1, 0, 30, 14, 2, 41, 5, 1, 44],
    [1, 9, 23, 2, 12, 8, 1, 5, 12, 4, 0, 64, 1, 5, 23, 1, 4, 44],
    [1, 1, 31, 10, 5, 22, 2, 2, 31, 0, 0, 0, 1, 1, 12, 0, 0, 0],
    [
        15, 1, 18, 3, 1, 38, 10, 1, 36, 10, 1, 20, 18, 4, 35, 10, 2, 40,
    ],
    [1, 13, 19, 0, 2, 19, 2, 5, 12, 27, 0, 41, 2, 7, 20, 2, 6, 41],
    [3, 2, 28, 3, 1, 34, 4, 2, 28, 0, 0, 0, 2, 1, 11, 0, 0, 0],
    [30, 1, 3, 21, 1, 20, 1, 0, 46, 26, 0, 6, 44, 5, 9, 28, 1, 22],
    [
        2, 20, 11, 3, 6, 12, 1, 1, 17, 49, 0, 20, 8, 13, 8, 5, 12, 32,
    ],
    [8, 3, 22, 11, 3, 23, 0, 1, 34, 0, 0, 0, 5, 5, 4, 0, 0, 0],
];

/// The 3x3 normalized block for KB `kb` and task `task`.
pub fn block(kb: usize, task: usize) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = f64::from(BLOCK_ROWS[kb * 3 + i][task * 3 + j]);
        }
    }
    out
}
