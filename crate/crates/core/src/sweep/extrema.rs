//! Interior extrema of tabulated sweep curves.
//!
//! Detection works on the exact solver output, so the noise floor of 1e-12
//! only guards against floating-point ripple. Each detected sign change of
//! the first differences is refined by bracketed minimization of the
//! continuous efficiency function inside the bracketing cells.

use crate::scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
}

/// An interior extremum of a sweep curve.
#[derive(Debug, Clone, Copy)]
pub struct Extremum {
    /// Grid index of the extreme tabulated value.
    pub index: usize,
    pub kind: ExtremumKind,
    /// Location refined within the bracketing grid cells.
    pub position: f64,
    /// Function value at `position`.
    pub value: f64,
}

/// Differences below this magnitude are treated as zero.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Detect and refine the interior extrema of `values` over `grid`.
///
/// `refine` re-evaluates the continuous function during bracketed
/// minimization; if it fails inside a bracket the discrete estimate is kept.
/// Missing values (`None`) split the table into independently scanned runs.
/// Fewer than five grid points yield no extrema.
pub fn find_extrema(
    grid: &[f64],
    values: &[Option<f64>],
    refine: &dyn Fn(f64) -> Option<f64>,
) -> Vec<Extremum> {
    assert_eq!(grid.len(), values.len());
    let mut out = Vec::new();
    if grid.len() < 5 {
        return out;
    }

    // contiguous runs of present values
    let mut start = 0;
    while start < values.len() {
        while start < values.len() && values[start].is_none() {
            start += 1;
        }
        let mut end = start;
        while end < values.len() && values[end].is_some() {
            end += 1;
        }
        if end - start >= 5 {
            scan_run(&grid[start..end], values, start, end, refine, &mut out);
        }
        start = end;
    }
    out
}

fn scan_run(
    grid: &[f64],
    values: &[Option<f64>],
    offset: usize,
    end: usize,
    refine: &dyn Fn(f64) -> Option<f64>,
    out: &mut Vec<Extremum>,
) {
    let val = |i: usize| values[offset + i].unwrap();
    let n = end - offset;

    // indices of nonzero-sign first differences (difference i spans i..i+1)
    let mut marks: Vec<(usize, i8)> = Vec::new();
    for i in 0..n - 1 {
        let d = val(i + 1) - val(i);
        if d > NOISE_FLOOR {
            marks.push((i, 1));
        } else if d < -NOISE_FLOOR {
            marks.push((i, -1));
        }
    }

    for w in marks.windows(2) {
        let ((i1, s1), (i2, s2)) = (w[0], w[1]);
        if s1 == s2 {
            continue;
        }
        let kind = if s1 > 0 { ExtremumKind::Maximum } else { ExtremumKind::Minimum };
        // the extremum lies between the two sloped differences
        let lo = i1;
        let hi = i2 + 1;
        let index_in_run = (lo..=hi)
            .reduce(|best, i| {
                let better = match kind {
                    ExtremumKind::Minimum => val(i) < val(best),
                    ExtremumKind::Maximum => val(i) > val(best),
                };
                if better { i } else { best }
            })
            .unwrap();

        let bracket = (grid[lo], grid[hi]);
        let refined = refine_extremum(kind, bracket, refine);
        let (position, value) = refined.unwrap_or((grid[index_in_run], val(index_in_run)));
        out.push(Extremum { index: offset + index_in_run, kind, position, value });
    }
}

fn refine_extremum(
    kind: ExtremumKind,
    (a, b): (f64, f64),
    refine: &dyn Fn(f64) -> Option<f64>,
) -> Option<(f64, f64)> {
    let ok = std::cell::Cell::new(true);
    let objective = |x: f64| match refine(x) {
        Some(v) => match kind {
            ExtremumKind::Minimum => v,
            ExtremumKind::Maximum => -v,
        },
        None => {
            ok.set(false);
            f64::INFINITY
        }
    };
    let m = scalar::minimize(&objective, a, b);
    if !ok.get() || !m.value.is_finite() {
        return None;
    }
    let value = match kind {
        ExtremumKind::Minimum => m.value,
        ExtremumKind::Maximum => -m.value,
    };
    Some((m.x, value))
}
