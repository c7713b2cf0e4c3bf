//! The `(n,d)` sweep over `5 < d <= n <= n_max`, its CSV rendering, the
//! winner-map CSV with a gnuplot script, and per-cell bound tables.

use std::fmt::Write as _;

use crate::bounds::{evaluate_all, BestBounds, BoundName, CellCaches, RecurrentBTable};
use crate::combinat::schoenheim_chain;
use crate::exec::Strategy;
use crate::{Error, Result};

pub const SWEEP_VERSION_LINE: &str = "# se-sweep-csv v1";
pub const FIG1_VERSION_LINE: &str = "# se-fig1-csv v1";

/// Bound columns of the sweep CSV, between `rate` and `best_upper`.
pub const SWEEP_BOUND_COLUMNS: [BoundName; 13] = [
    BoundName::SchwartzVardyLower,
    BoundName::SimpleLower,
    BoundName::Schoenheim,
    BoundName::DeCaen,
    BoundName::SeLower,
    BoundName::Probabilistic,
    BoundName::DrawNorepl,
    BoundName::ConstructionA,
    BoundName::ConstructionB,
    BoundName::RecurrentA,
    BoundName::RecurrentB,
    BoundName::RecurrentC,
    BoundName::SchwartzVardyUpper,
];

pub fn sweep_header() -> String {
    let mut cols = vec!["n", "d", "rate"];
    cols.extend(SWEEP_BOUND_COLUMNS.iter().map(|b| b.as_str()));
    cols.extend(["best_upper", "winner"]);
    cols.join(",")
}

/// All cells `5 < d <= n <= n_max` in `(n, d)` order.
pub fn sweep_cells(n_max: usize) -> Vec<(usize, usize)> {
    (6..=n_max).flat_map(|n| (6..=n).map(move |d| (n, d))).collect()
}

/// Evaluates every cell. Schönheim chains (per `t`) and Recurrent B term
/// tables (per `m = n−d+1`) are built once and shared.
pub fn sweep(n_max: usize, strategy: Strategy) -> Result<Vec<BestBounds>> {
    if n_max > crate::combinat::TABLE_MAX_N {
        return Err(Error::params(format!(
            "sweep supports n_max <= {}",
            crate::combinat::TABLE_MAX_N
        )));
    }
    let cells = sweep_cells(n_max);
    if cells.is_empty() {
        return Ok(Vec::new());
    }
    // t = d−2 ranges over 4..=n_max−2; chain index j holds n = t+1+j.
    let t_count = n_max - 5;
    let chains = strategy.map_range(t_count, |j| schoenheim_chain((j + 4) as i64, n_max as i64));
    // m = n−d+1 ranges over 1..=n_max−5; terms needed up to t = n_max−m−1.
    let tables: Vec<Result<RecurrentBTable>> =
        strategy.map_range(n_max - 5, |j| RecurrentBTable::new(j + 1, n_max - j - 2));
    let tables: Vec<RecurrentBTable> = tables.into_iter().collect::<Result<_>>()?;
    let results = strategy.map_slice(&cells, |&(n, d)| {
        let t = d - 2;
        let caches = CellCaches {
            schoenheim: Some(&chains[t - 4][n - t - 1]),
            recurrent_b: Some(&tables[n - d]),
        };
        evaluate_all(n, d, &caches)
    });
    results.into_iter().collect()
}

fn rate(n: usize, d: usize) -> String {
    format!("{:.6}", (n - d + 1) as f64 / n as f64)
}

pub fn render_sweep_csv(cells: &[BestBounds]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_VERSION_LINE);
    out.push('\n');
    out.push_str(&sweep_header());
    out.push('\n');
    for c in cells {
        let _ = write!(out, "{},{},{}", c.n, c.d, rate(c.n, c.d));
        for name in &SWEEP_BOUND_COLUMNS {
            out.push(',');
            if let Some(v) = c.value(*name) {
                let _ = write!(out, "{v}");
            }
        }
        let _ = writeln!(out, ",{},{}", c.best_upper, c.winner);
    }
    out
}

pub fn render_fig1_csv(cells: &[BestBounds]) -> String {
    let mut out = String::new();
    out.push_str(FIG1_VERSION_LINE);
    out.push('\n');
    out.push_str("n,d,winner\n");
    for c in cells {
        let _ = writeln!(out, "{},{},{}", c.n, c.d, c.winner);
    }
    out
}

/// Gnuplot script drawing the winner map from the CSV at `csv_path`.
pub fn fig1_plot_script(csv_path: &str, n_max: usize) -> String {
    let mut idx = String::new();
    for (i, name) in BoundName::WINNER_CANDIDATES.iter().enumerate() {
        let _ = write!(idx, "strcol(3) eq \"{name}\" ? {i} : ");
    }
    idx.push_str("-1");
    let mut labels = String::new();
    for (i, name) in BoundName::WINNER_CANDIDATES.iter().enumerate() {
        let _ = writeln!(labels, "set label {} \"{name}\" at graph 1.02, graph {:.2} font \",8\"", i + 1, 0.95 - 0.06 * i as f64);
    }
    format!(
        "# gnuplot script: best upper bound on S(n,d-2) per (n,d)\n\
         set datafile separator \",\"\n\
         set datafile commentschars \"#\"\n\
         set terminal pngcairo size 900,800\n\
         set output \"fig1.png\"\n\
         set xlabel \"n\"\n\
         set ylabel \"d\"\n\
         set xrange [0:{n_max}]\n\
         set yrange [0:{n_max}]\n\
         set cbrange [0:{}]\n\
         set palette maxcolors {}\n\
         unset colorbox\n\
         set rmargin 16\n\
         {labels}\
         winner(x) = ({idx})\n\
         plot \"{csv_path}\" skip 2 using 1:2:(winner(0)) with points pt 5 ps 0.4 lc palette notitle\n",
        BoundName::WINNER_CANDIDATES.len() - 1,
        BoundName::WINNER_CANDIDATES.len(),
    )
}

/// Human-readable table of every bound at one cell.
pub fn render_table(b: &BestBounds) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n={} d={} t={} rate={}", b.n, b.d, b.d - 2, rate(b.n, b.d));
    let _ = writeln!(out, "{:<22} {:>6} {:>40}  params", "bound", "kind", "value");
    for r in b.uppers.iter().chain(&b.lowers) {
        let mark = if r.name == b.winner { " *" } else { "" };
        let kind = match r.kind {
            crate::bounds::BoundKind::Upper => "upper",
            crate::bounds::BoundKind::Lower => "lower",
        };
        let _ = writeln!(out, "{:<22} {:>6} {:>40}  {}{mark}", r.name.as_str(), kind, r.value, r.params);
    }
    let _ = writeln!(out, "winner: {} ({})", b.winner, b.best_upper);
    let _ = writeln!(out, "best lower: {}", b.best_lower);
    out
}

/// `bound,kind,value,params` rows for one cell.
pub fn render_table_csv(b: &BestBounds) -> String {
    let mut out = String::from("n,d,bound,kind,value,params\n");
    for r in b.uppers.iter().chain(&b.lowers) {
        let kind = match r.kind {
            crate::bounds::BoundKind::Upper => "upper",
            crate::bounds::BoundKind::Lower => "lower",
        };
        let _ = writeln!(out, "{},{},{},{kind},{},\"{}\"", b.n, b.d, r.name, r.value, r.params);
    }
    let _ = writeln!(out, "{},{},winner,,{},{}", b.n, b.d, b.best_upper, b.winner);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_has_spec_columns() {
        assert_eq!(
            sweep_header(),
            "n,d,rate,schwartz_vardy_lower,simple_lower,schoenheim,decaen,se_lower,probabilistic,\
             draw_norepl,construction_a,construction_b,recurrent_a,recurrent_b,recurrent_c,\
             schwartz_vardy_upper,best_upper,winner"
        );
    }

    #[test]
    fn cells_cover_domain() {
        let c = sweep_cells(8);
        assert_eq!(c, vec![(6, 6), (7, 6), (7, 7), (8, 6), (8, 7), (8, 8)]);
    }

    #[test]
    fn small_sweep_matches_direct() {
        let s = sweep(14, Strategy::Sequential).unwrap();
        for c in &s {
            let direct = crate::bounds::best_bounds(c.n, c.d).unwrap();
            assert_eq!(c.winner, direct.winner);
            for name in &SWEEP_BOUND_COLUMNS {
                assert_eq!(c.value(*name), direct.value(*name), "{} at ({},{})", name, c.n, c.d);
            }
        }
        let csv = render_sweep_csv(&s);
        assert_eq!(csv.lines().count(), 2 + s.len());
    }
}
