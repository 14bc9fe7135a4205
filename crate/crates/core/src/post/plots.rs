//! Static SVG line charts. Output depends only on the input rows.

use std::fmt::Write as _;

use crate::config::units;
use crate::engine::SimState;
use crate::error::{Error, Result};

const WIDTH: f64 = 900.0;
const PANEL_H: f64 = 260.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const GAP: f64 = 50.0;
const MAX_POINTS: usize = 1500;
const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"];

pub struct Series<'a> {
    pub label: &'a str,
    pub values: Vec<f64>,
}

pub struct Panel<'a> {
    pub y_label: &'a str,
    pub series: Vec<Series<'a>>,
}

/// A named SVG document, path relative to the `plots/` directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plot {
    pub file_name: &'static str,
    pub svg: String,
}

pub fn render_plots(rows: &[SimState]) -> Result<Vec<Plot>> {
    if rows.is_empty() {
        return Err(Error::Usage("cannot plot an empty run".into()));
    }
    let t: Vec<f64> = rows.iter().map(|r| r.time_s).collect();
    let col = |f: fn(&SimState) -> f64| rows.iter().map(f).collect::<Vec<_>>();

    let motion = [
        Panel {
            y_label: "speed [km/h]",
            series: vec![Series {
                label: "speed",
                values: col(|r| units::mps_to_kmh(r.speed_mps)),
            }],
        },
        Panel {
            y_label: "SoC [-]",
            series: vec![Series {
                label: "soc",
                values: col(|r| r.soc),
            }],
        },
    ];
    let power = [
        Panel {
            y_label: "power [kW]",
            series: vec![
                Series {
                    label: "drive dc",
                    values: col(|r| units::w_to_kw(r.p_drive_dc_w)),
                },
                Series {
                    label: "regen",
                    values: col(|r| units::w_to_kw(r.p_regen_w)),
                },
                Series {
                    label: "hvac",
                    values: col(|r| units::w_to_kw(r.p_hvac_w)),
                },
                Series {
                    label: "battery net",
                    values: col(|r| units::w_to_kw(r.p_batt_net_w)),
                },
            ],
        },
        Panel {
            y_label: "temperature [C]",
            series: vec![
                Series {
                    label: "battery",
                    values: col(|r| r.t_batt_c),
                },
                Series {
                    label: "motor",
                    values: col(|r| r.t_motor_c),
                },
                Series {
                    label: "coolant",
                    values: col(|r| r.t_coolant_c),
                },
                Series {
                    label: "cabin",
                    values: col(|r| r.t_cabin_c),
                },
            ],
        },
    ];
    Ok(vec![
        Plot {
            file_name: "motion_soc.svg",
            svg: render_chart("Motion and state of charge", &t, &motion),
        },
        Plot {
            file_name: "power_thermal.svg",
            svg: render_chart("Power and thermal response", &t, &power),
        },
    ])
}

fn stride(n: usize) -> usize {
    n.div_ceil(MAX_POINTS).max(1)
}

fn sample_indices(n: usize) -> Vec<usize> {
    let s = stride(n);
    let mut idx: Vec<usize> = (0..n).step_by(s).collect();
    if idx.last() != Some(&(n - 1)) {
        idx.push(n - 1);
    }
    idx
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        let pad = lo.abs().max(1.0) * 0.05;
        (lo - pad, hi + pad)
    } else {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn render_chart(title: &str, t: &[f64], panels: &[Panel]) -> String {
    let height = MARGIN_T + panels.len() as f64 * (PANEL_H + GAP);
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let idx = sample_indices(t.len());
    let (t0, t1) = extent(t.iter().copied());

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{h}" viewBox="0 0 {WIDTH} {h}" font-family="sans-serif" font-size="12">"#,
        h = num(height)
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        num(WIDTH / 2.0),
        escape(title)
    );

    for (p, panel) in panels.iter().enumerate() {
        let top = MARGIN_T + p as f64 * (PANEL_H + GAP);
        let (y0, y1) = extent(panel.series.iter().flat_map(|s| s.values.iter().copied()));
        let px = |x: f64| MARGIN_L + (x - t0) / (t1 - t0) * plot_w;
        let py = |y: f64| top + PANEL_H - (y - y0) / (y1 - y0) * PANEL_H;

        let _ = writeln!(
            s,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
            num(MARGIN_L),
            num(top),
            num(plot_w),
            num(PANEL_H)
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let yv = y0 + f * (y1 - y0);
            let xv = t0 + f * (t1 - t0);
            let _ = writeln!(
                s,
                r##"<text x="{}" y="{}" text-anchor="end" fill="#444">{}</text>"##,
                num(MARGIN_L - 6.0),
                num(py(yv) + 4.0),
                tick(yv)
            );
            let _ = writeln!(
                s,
                r##"<text x="{}" y="{}" text-anchor="middle" fill="#444">{}</text>"##,
                num(px(xv)),
                num(top + PANEL_H + 16.0),
                tick(xv)
            );
        }
        let _ = writeln!(
            s,
            r#"<text transform="translate(16 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
            num(top + PANEL_H / 2.0),
            escape(panel.y_label)
        );
        if p + 1 == panels.len() {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle">time [s]</text>"#,
                num(MARGIN_L + plot_w / 2.0),
                num(top + PANEL_H + 34.0)
            );
        }
        for (k, series) in panel.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let mut d = String::new();
            for (j, &i) in idx.iter().enumerate() {
                let v = series.values[i];
                let v = if v.is_finite() { v } else { y0 };
                let _ = write!(
                    d,
                    "{}{} {}",
                    if j == 0 { "M" } else { " L" },
                    num(px(t[i])),
                    num(py(v))
                );
            }
            let _ = writeln!(
                s,
                r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.2"/>"#
            );
            let ly = top + 14.0 + k as f64 * 14.0;
            let lx = MARGIN_L + plot_w - 110.0;
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
                num(lx),
                num(ly - 4.0),
                num(lx + 18.0),
                num(ly - 4.0),
                num(lx + 24.0),
                num(ly),
                escape(series.label)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    let a = v.abs();
    let s = if a >= 100.0 {
        format!("{v:.0}")
    } else if a >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    };
    match s.as_str() {
        "-0" | "-0.0" | "-0.000" => s[1..].to_string(),
        _ => s,
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(n: usize) -> Vec<SimState> {
        (0..n)
            .map(|i| SimState {
                time_s: (i + 1) as f64 * 0.1,
                speed_mps: (i as f64 * 0.01).sin().abs() * 20.0,
                soc: 0.9 - i as f64 * 1e-5,
                ..Default::default()
            })
            .collect()
    }

    #[test]
    fn empty_run_is_rejected() {
        assert!(render_plots(&[]).is_err());
    }

    #[test]
    fn two_documents_deterministic() {
        let r = rows(5000);
        let a = render_plots(&r).unwrap();
        let b = render_plots(&r).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        for p in &a {
            assert!(p.svg.starts_with("<svg"));
            assert!(p.svg.trim_end().ends_with("</svg>"));
            assert!(!p.svg.contains("NaN"));
        }
    }

    #[test]
    fn downsampling_keeps_endpoints() {
        let idx = sample_indices(18000);
        assert!(idx.len() <= MAX_POINTS + 1);
        assert_eq!(idx[0], 0);
        assert_eq!(*idx.last().unwrap(), 17999);
        assert_eq!(sample_indices(1), vec![0]);
    }
}
