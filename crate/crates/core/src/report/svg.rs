//! Hand-written SVG bar charts with a fixed 600x400 viewport. Output
//! depends only on the input values, so identical inputs give identical bytes.

use std::fmt::Write;

use indexmap::IndexMap;

use crate::stats::ContrastCI;

pub const WIDTH: f64 = 600.0;
pub const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 45.0;
const BOTTOM: f64 = 95.0;

/// Level 0 of the grouping factor (the control) is red, level 1 blue.
pub const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, PartialEq)]
pub struct Bar {
    pub label: String,
    pub value: f64,
    pub half_width: Option<f64>,
    /// Index into the chart's groups, which selects the colour.
    pub group: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarChart {
    pub title: String,
    pub y_label: String,
    pub groups: Vec<String>,
    pub bars: Vec<Bar>,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let norm = raw / magnitude;
    let factor = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    factor * magnitude
}

fn tick_label(value: f64, step: f64) -> String {
    let decimals = if step >= 1.0 { 0 } else { (-step.log10()).ceil() as usize };
    let text = format!("{value:.decimals$}");
    // avoid "-0"
    if text.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        text.trim_start_matches('-').to_string()
    } else {
        text
    }
}

impl BarChart {
    pub fn render(&self) -> String {
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
        );
        let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="22" font-size="14" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let finite = |v: f64| if v.is_finite() { v } else { 0.0 };
        let mut lo: f64 = 0.0;
        let mut hi: f64 = 0.0;
        for bar in &self.bars {
            let hw = finite(bar.half_width.unwrap_or(0.0));
            lo = lo.min(finite(bar.value) - hw);
            hi = hi.max(finite(bar.value) + hw);
        }
        if hi - lo < 1e-9 {
            hi = lo + 1.0;
        }
        let step = nice_step(hi - lo);
        let lo = (lo / step).floor() * step;
        let hi = (hi / step).ceil() * step;
        let y_of = |v: f64| TOP + plot_h * (hi - v) / (hi - lo);

        // axes and ticks
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}" stroke="#333"/>"##,
            TOP + plot_h
        );
        let n_ticks = ((hi - lo) / step).round() as i64;
        for k in 0..=n_ticks {
            let v = lo + k as f64 * step;
            let y = y_of(v);
            let _ = writeln!(
                svg,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="#333"/>"##,
                LEFT - 4.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                y + 3.5,
                tick_label(v, step)
            );
        }
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#333"/>"##,
            y_of(0.0),
            LEFT + plot_w,
            y_of(0.0)
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            TOP + plot_h / 2.0,
            TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        // bars, with a one-slot gap between groups
        let mut slots = Vec::with_capacity(self.bars.len());
        let mut position: f64 = 0.0;
        for (i, bar) in self.bars.iter().enumerate() {
            if i > 0 && self.bars[i - 1].group != bar.group {
                position += 0.5;
            }
            slots.push(position);
            position += 1.0;
        }
        let slot_w = plot_w / position.max(1.0);
        let bar_w = slot_w * 0.8;
        let font = if slot_w < 20.0 { 7 } else { 10 };
        for (bar, slot) in self.bars.iter().zip(&slots) {
            let x = LEFT + slot * slot_w + (slot_w - bar_w) / 2.0;
            let value = finite(bar.value);
            let (top, bottom) = (y_of(value.max(0.0)), y_of(value.min(0.0)));
            let colour = PALETTE[bar.group % PALETTE.len()];
            let _ = writeln!(
                svg,
                r#"<rect x="{x:.2}" y="{top:.2}" width="{bar_w:.2}" height="{:.2}" fill="{colour}"><title>{}: {:.4}</title></rect>"#,
                bottom - top,
                escape(&bar.label),
                bar.value
            );
            if let Some(hw) = bar.half_width.filter(|h| h.is_finite()) {
                let cx = x + bar_w / 2.0;
                let (y1, y2) = (y_of(value + hw), y_of(value - hw));
                let _ = writeln!(
                    svg,
                    r##"<path d="M{cx:.2} {y1:.2}V{y2:.2}M{:.2} {y1:.2}H{:.2}M{:.2} {y2:.2}H{:.2}" stroke="#000" fill="none"/>"##,
                    cx - 4.0,
                    cx + 4.0,
                    cx - 4.0,
                    cx + 4.0
                );
            }
            let lx = x + bar_w / 2.0;
            let ly = TOP + plot_h + 12.0;
            let _ = writeln!(
                svg,
                r#"<text x="{lx:.2}" y="{ly:.2}" font-size="{font}" text-anchor="end" transform="rotate(-40 {lx:.2} {ly:.2})">{}</text>"#,
                escape(&bar.label)
            );
        }

        // legend
        for (g, name) in self.groups.iter().enumerate() {
            let y = TOP + 4.0 + g as f64 * 14.0;
            let x = WIDTH - RIGHT - 130.0;
            let _ = writeln!(
                svg,
                r#"<rect x="{x:.2}" y="{y:.2}" width="10" height="10" fill="{}"/>"#,
                PALETTE[g % PALETTE.len()]
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="10">{}</text>"#,
                x + 14.0,
                y + 9.0,
                escape(name)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Condition-mean bar chart. Conditions are labelled `factor=level,...`;
/// bars are grouped and coloured by the level of `grouping`, with error
/// bars from `cis` where available.
pub fn render_bar_chart(
    title: &str,
    means: &IndexMap<String, f64>,
    cis: Option<&ContrastCI>,
    grouping: Option<&str>,
) -> String {
    let mut groups: Vec<String> = Vec::new();
    let mut bars: Vec<Bar> = Vec::new();
    for (condition, mean) in means {
        let mut group = String::new();
        let mut rest = Vec::new();
        for part in condition.split(',') {
            match part.split_once('=') {
                Some((factor, level)) if Some(factor) == grouping => group = level.to_string(),
                _ => rest.push(part),
            }
        }
        let index = match groups.iter().position(|g| *g == group) {
            Some(i) => i,
            None => {
                groups.push(group);
                groups.len() - 1
            }
        };
        bars.push(Bar {
            label: rest.join(","),
            value: *mean,
            half_width: cis.and_then(|c| c.get(condition)).map(|c| c.half_width),
            group: index,
        });
    }
    // stable sort keeps condition order within each group
    bars.sort_by_key(|b| b.group);
    if grouping.is_none() {
        groups.clear();
    } else if let Some(name) = grouping {
        for g in &mut groups {
            *g = format!("{name}={g}");
        }
    }
    BarChart {
        title: title.to_string(),
        y_label: "surprisal (bits)".into(),
        groups,
        bars,
    }
    .render()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn means() -> IndexMap<String, f64> {
        IndexMap::from([
            ("gap=yes,structure=control".to_string(), 2.0),
            ("gap=yes,structure=island".to_string(), 3.0),
            ("gap=no,structure=control".to_string(), 2.0),
            ("gap=no,structure=island".to_string(), 1.0),
        ])
    }

    #[test]
    fn deterministic_and_grouped() {
        let a = render_bar_chart("t", &means(), None, Some("structure"));
        let b = render_bar_chart("t", &means(), None, Some("structure"));
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains(r#"width="600" height="400""#));
        assert!(a.contains("#d62728") && a.contains("#1f77b4"));
        assert!(a.contains("structure=control"));
    }

    #[test]
    fn equal_means_give_equal_bars() {
        let means = IndexMap::from([("a=1".to_string(), 4.0), ("a=2".to_string(), 4.0)]);
        let svg = render_bar_chart("eq", &means, None, None);
        let heights: Vec<&str> = svg
            .lines()
            .filter(|l| l.contains("<title>"))
            .map(|l| l.split("height=\"").nth(1).unwrap().split('"').next().unwrap())
            .collect();
        assert_eq!(heights.len(), 2);
        assert_eq!(heights[0], heights[1]);
    }

    #[test]
    fn ticks() {
        assert_eq!(nice_step(10.0), 2.0);
        assert_eq!(nice_step(0.7), 0.2);
        assert_eq!(tick_label(-0.0, 0.5), "0.0");
    }
}
