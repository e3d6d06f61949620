//! Deterministic PNG/SVG rendering of configurations and series plots.

use image::codecs::png::{CompressionType, FilterType, PngEncoder};
use image::{ImageEncoder, Rgb, RgbImage};
use thiserror::Error;

use crate::gasket::GasketGraph;
use crate::growth::{GrowthOutcome, IdlaEnsemble};
use crate::radial::{d_h, GValue};
use crate::sandpile::SandpileConfig;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("image encoding failed: {0}")]
    Image(#[from] image::ImageError),
    #[error("invalid argument: {0}")]
    Usage(String),
}

/// Chip colours for 0, 1, 2 and 3, a sink marker and an overflow colour for
/// transient values of 4 or more.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Palette {
    pub chips: [[u8; 3]; 4],
    pub sink: [u8; 3],
    pub overflow: [u8; 3],
    pub background: [u8; 3],
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            chips: [
                [232, 232, 232],
                [64, 112, 200],
                [250, 196, 40],
                [200, 40, 40],
            ],
            sink: [0, 0, 0],
            overflow: [150, 40, 200],
            background: [255, 255, 255],
        }
    }
}

impl Palette {
    pub fn color(&self, chips: u64) -> [u8; 3] {
        match chips {
            0..=3 => self.chips[chips as usize],
            _ => self.overflow,
        }
    }
}

/// Vertex values to draw; `None` entries are left as background.
#[derive(Debug, Clone)]
pub struct Frame<'a> {
    pub graph: &'a GasketGraph,
    pub values: Vec<Option<u64>>,
    pub sinks: Vec<u32>,
}

impl<'a> Frame<'a> {
    pub fn from_config(c: &'a SandpileConfig) -> Self {
        let view = c.view();
        let mut values = vec![None; view.graph().num_vertices()];
        for (v, &x) in c.chips().iter().enumerate() {
            values[v] = Some(x);
        }
        Frame {
            graph: view.graph(),
            values,
            sinks: view.sinks(),
        }
    }

    /// The final configuration restricted to the smallest `G_k` holding the
    /// cluster and its neighbours.
    pub fn from_outcome(o: &'a GrowthOutcome) -> Self {
        let g = o.graph.as_ref();
        let reach = (o.out_radius.max(0) + 1) as u64;
        let mut k = 0;
        while (1u64 << k) < reach && k < g.level() {
            k += 1;
        }
        let nv = g.prefix_len(k);
        let mut values = vec![None; g.num_vertices()];
        for (v, slot) in values.iter_mut().enumerate().take(nv) {
            *slot = Some(o.config.get(v).copied().unwrap_or(0));
        }
        Frame {
            graph: g,
            values,
            sinks: Vec::new(),
        }
    }
}

/// Pixel square of one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cell {
    x: u32,
    y: u32,
    size: u32,
    color: [u8; 3],
}

/// Vertex `i·(1,0) + j·(1/2, √3/2)` maps to a `size × size` square, `scale`
/// pixels per unit length, with `y` pointing up.
fn layout(frame: &Frame, palette: &Palette, scale: u32) -> (u32, u32, Vec<Cell>) {
    let s = scale.max(1) as f64;
    let size = ((s * 0.8).round() as u32).max(1);
    let drawn: Vec<(u32, (f64, f64))> = frame
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_some())
        .map(|(v, _)| (v as u32, frame.graph.vertex(v as u32).position()))
        .collect();
    if drawn.is_empty() {
        return (size, size, Vec::new());
    }
    let xmin = drawn.iter().map(|d| d.1 .0).fold(f64::INFINITY, f64::min);
    let xmax = drawn
        .iter()
        .map(|d| d.1 .0)
        .fold(f64::NEG_INFINITY, f64::max);
    let ymax = drawn
        .iter()
        .map(|d| d.1 .1)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut sink = vec![false; frame.values.len()];
    for &v in &frame.sinks {
        sink[v as usize] = true;
    }
    let cells = drawn
        .iter()
        .map(|&(v, (x, y))| Cell {
            x: ((x - xmin) * s).round() as u32,
            y: ((ymax - y) * s).round() as u32,
            size,
            color: if sink[v as usize] {
                palette.sink
            } else {
                palette.color(frame.values[v as usize].unwrap())
            },
        })
        .collect();
    let width = ((xmax - xmin) * s).round() as u32 + size;
    let height = (ymax * s).round() as u32 + size;
    (width, height, cells)
}

fn encode_png(img: &RgbImage) -> Result<Vec<u8>, RenderError> {
    let mut out = Vec::new();
    PngEncoder::new_with_quality(&mut out, CompressionType::Default, FilterType::NoFilter)
        .write_image(
            img.as_raw(),
            img.width(),
            img.height(),
            image::ExtendedColorType::Rgb8,
        )?;
    Ok(out)
}

pub fn render_png(frame: &Frame, palette: &Palette, scale: u32) -> Result<Vec<u8>, RenderError> {
    let (w, h, cells) = layout(frame, palette, scale);
    let mut img = RgbImage::from_pixel(w, h, Rgb(palette.background));
    for c in cells {
        for dy in 0..c.size {
            for dx in 0..c.size {
                img.put_pixel(c.x + dx, c.y + dy, Rgb(c.color));
            }
        }
    }
    encode_png(&img)
}

pub fn render_svg(frame: &Frame, palette: &Palette, scale: u32) -> String {
    let (w, h, cells) = layout(frame, palette, scale);
    let hex = |c: [u8; 3]| format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2]);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" shape-rendering=\"crispEdges\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"{}\"/>\n",
        hex(palette.background)
    );
    for c in cells {
        s.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
            c.x,
            c.y,
            c.size,
            c.size,
            hex(c.color)
        ));
    }
    s.push_str("</svg>\n");
    s
}

/// Data for [`plot_series`].
#[derive(Debug, Clone, Copy)]
pub enum Series<'a> {
    /// `(m, r_m)` pairs, drawn between `0.3871·m^{1/d_H}` and `0.75·m^{1/d_H}`.
    Radius(&'a [(u64, u64)]),
    GFunction(&'a [GValue]),
    /// Out- and in-radius deviations per run with their running envelopes.
    Fluctuations(&'a IdlaEnsemble),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plot {
    pub png: Vec<u8>,
    pub csv: String,
}

const PLOT_W: u32 = 640;
const PLOT_H: u32 = 400;
const MARGIN: u32 = 20;

struct Canvas {
    img: RgbImage,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Canvas {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let mut img = RgbImage::from_pixel(PLOT_W, PLOT_H, Rgb([255, 255, 255]));
        for x in MARGIN..PLOT_W - MARGIN {
            img.put_pixel(x, PLOT_H - MARGIN, Rgb([0, 0, 0]));
        }
        for y in MARGIN..=PLOT_H - MARGIN {
            img.put_pixel(MARGIN, y, Rgb([0, 0, 0]));
        }
        let pad = |a: f64, b: f64| if b > a { (a, b) } else { (a - 1.0, a + 1.0) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Canvas {
            img,
            x0,
            x1,
            y0,
            y1,
        }
    }

    fn pixel(&self, x: f64, y: f64) -> (i64, i64) {
        let w = (PLOT_W - 2 * MARGIN) as f64;
        let h = (PLOT_H - 2 * MARGIN) as f64;
        let px = MARGIN as f64 + (x - self.x0) / (self.x1 - self.x0) * w;
        let py = (PLOT_H - MARGIN) as f64 - (y - self.y0) / (self.y1 - self.y0) * h;
        (px.round() as i64, py.round() as i64)
    }

    fn dot(&mut self, x: f64, y: f64, color: [u8; 3]) {
        let (px, py) = self.pixel(x, y);
        if px >= 0 && py >= 0 && (px as u32) < PLOT_W && (py as u32) < PLOT_H {
            self.img.put_pixel(px as u32, py as u32, Rgb(color));
        }
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), color: [u8; 3]) {
        let (p, q) = (self.pixel(a.0, a.1), self.pixel(b.0, b.1));
        let steps = (q.0 - p.0).abs().max((q.1 - p.1).abs()).max(1);
        for t in 0..=steps {
            let x = p.0 + (q.0 - p.0) * t / steps;
            let y = p.1 + (q.1 - p.1) * t / steps;
            if x >= 0 && y >= 0 && (x as u32) < PLOT_W && (y as u32) < PLOT_H {
                self.img.put_pixel(x as u32, y as u32, Rgb(color));
            }
        }
    }

    fn polyline(&mut self, pts: &[(f64, f64)], color: [u8; 3]) {
        for w in pts.windows(2) {
            self.line(w[0], w[1], color);
        }
    }
}

const INK: [u8; 3] = [20, 20, 20];
const BOUND: [u8; 3] = [200, 40, 40];
const ALT: [u8; 3] = [40, 90, 200];

fn bounds(vals: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let lo = vals.clone().fold(f64::INFINITY, f64::min);
    let hi = vals.fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

pub fn plot_series(series: Series) -> Result<Plot, RenderError> {
    match series {
        Series::Radius(rows) => {
            if rows.is_empty() {
                return Err(RenderError::Usage("no radius records to plot".into()));
            }
            let e = 1.0 / d_h();
            let lower = |m: f64| 0.3871 * m.powf(e);
            let upper = |m: f64| 0.75 * m.powf(e);
            let (x0, x1) = bounds(rows.iter().map(|r| r.0 as f64));
            let (_, rmax) = bounds(rows.iter().map(|r| r.1 as f64));
            let mut c = Canvas::new(x0, x1, 0.0, rmax.max(upper(x1)));
            let mut csv = String::from("m,r,lower,upper\n");
            let mut steps = Vec::with_capacity(2 * rows.len());
            for (i, &(m, r)) in rows.iter().enumerate() {
                let (m, r) = (m as f64, r as f64);
                if i > 0 {
                    steps.push((m, steps.last().map(|p: &(f64, f64)| p.1).unwrap()));
                }
                steps.push((m, r));
                csv.push_str(&format!("{},{},{},{}\n", m, r, lower(m), upper(m)));
            }
            let grid: Vec<f64> = rows.iter().map(|r| r.0 as f64).collect();
            c.polyline(
                &grid.iter().map(|&m| (m, lower(m))).collect::<Vec<_>>(),
                BOUND,
            );
            c.polyline(
                &grid.iter().map(|&m| (m, upper(m))).collect::<Vec<_>>(),
                BOUND,
            );
            c.polyline(&steps, INK);
            Ok(Plot {
                png: encode_png(&c.img)?,
                csv,
            })
        }
        Series::GFunction(vals) => {
            if vals.is_empty() {
                return Err(RenderError::Usage("no 𝒢 samples to plot".into()));
            }
            let (x0, x1) = bounds(vals.iter().map(|v| v.x));
            let mut c = Canvas::new(x0, x1, 0.35, 0.8);
            for y in [0.3871, 0.75] {
                c.line((x0, y), (x1, y), BOUND);
            }
            let mut csv = String::from("x,g_value,trunc_bound\n");
            for v in vals {
                c.dot(v.x, v.value, INK);
                csv.push_str(&format!("{},{},{}\n", v.x, v.value, v.trunc_bound));
            }
            Ok(Plot {
                png: encode_png(&c.img)?,
                csv,
            })
        }
        Series::Fluctuations(ens) => {
            if ens.runs.is_empty() {
                return Err(RenderError::Usage("empty IDLA ensemble".into()));
            }
            let n = ens.n as f64;
            let outs: Vec<f64> = ens.runs.iter().map(|r| r.out_radius as f64 - n).collect();
            let ins: Vec<f64> = ens.runs.iter().map(|r| r.in_radius as f64 - n).collect();
            let (lo, _) = bounds(ins.iter().copied());
            let (_, hi) = bounds(outs.iter().copied());
            let mut c = Canvas::new(0.0, (ens.runs.len() - 1) as f64, lo.min(0.0), hi.max(0.0));
            let mut max_env = Vec::new();
            let mut min_env = Vec::new();
            let (mut top, mut bottom) = (f64::NEG_INFINITY, f64::INFINITY);
            for (i, (o, inn)) in outs.iter().zip(&ins).enumerate() {
                top = top.max(*o);
                bottom = bottom.min(*inn);
                max_env.push((i as f64, top));
                min_env.push((i as f64, bottom));
                c.dot(i as f64, *o, INK);
                c.dot(i as f64, *inn, ALT);
            }
            c.polyline(&max_env, BOUND);
            c.polyline(&min_env, BOUND);
            Ok(Plot {
                png: encode_png(&c.img)?,
                csv: ens.stats_csv(),
            })
        }
    }
}
