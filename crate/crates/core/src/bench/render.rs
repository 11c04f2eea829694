use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geom::{CommGraph, Instance, Point};
use crate::relocation::RestorationPlan;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 30.0;

/// Draws robots and links of `graph`. With a plan, robots and links are
/// drawn at the final positions, originals as hollow gray circles and gray
/// dashed arrows mark each displacement.
pub fn render_svg(instance: &Instance, graph: &CommGraph, plan: Option<&RestorationPlan>) -> Result<String> {
    if instance.dim() != 2 {
        return Err(Error::RenderUnsupported(instance.dim()));
    }
    if graph.n() != instance.n() {
        return Err(Error::InvalidArgument(format!("graph has {} vertices, instance {}", graph.n(), instance.n())));
    }
    let original = instance.positions();
    let current: &[Point] = match plan {
        Some(p) if p.final_positions.len() != original.len() => {
            return Err(Error::InvalidArgument("plan and instance sizes differ".into()));
        }
        Some(p) => &p.final_positions,
        None => original,
    };

    let all = original.iter().chain(current);
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in all {
        x0 = x0.min(p.0[0]);
        y0 = y0.min(p.0[1]);
        x1 = x1.max(p.0[0]);
        y1 = y1.max(p.0[1]);
    }
    let span = (x1 - x0).max(y1 - y0).max(instance.h());
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let map = |p: &Point| (MARGIN + (p.0[0] - x0) * scale, SIZE - MARGIN - (p.0[1] - y0) * scale);
    let r = (0.08 * instance.h() * scale).clamp(3.0, 10.0);

    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#).unwrap();
    out.push_str(concat!(
        r#"<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" orient="auto">"#,
        r##"<path d="M0,0 L10,5 L0,10 z" fill="#888"/></marker></defs>"##,
        "\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    for (u, v) in graph.edges() {
        let (ax, ay) = map(&current[u]);
        let (bx, by) = map(&current[v]);
        writeln!(out, r##"<line x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}" stroke="#4a6fa5" stroke-width="1.5"/>"##).unwrap();
    }
    if plan.is_some() {
        for (a, b) in original.iter().zip(current) {
            if a.dist(b) <= crate::geom::EPS {
                continue;
            }
            let (ax, ay) = map(a);
            let (bx, by) = map(b);
            writeln!(out, r##"<circle cx="{ax:.3}" cy="{ay:.3}" r="{r:.3}" fill="none" stroke="#888"/>"##).unwrap();
            writeln!(
                out,
                r##"<line x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}" stroke="#888" stroke-dasharray="4,3" marker-end="url(#arrow)"/>"##
            )
            .unwrap();
        }
    }
    for (i, p) in current.iter().enumerate() {
        let (cx, cy) = map(p);
        writeln!(out, r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{r:.3}" fill="#d9534f" stroke="black"/>"##).unwrap();
        writeln!(out, r#"<text x="{:.3}" y="{:.3}" font-size="10" font-family="sans-serif">{i}</text>"#, cx + r + 1.0, cy - r - 1.0).unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::build_comm_graph;
    use crate::restore::eascr;

    #[test]
    fn renders_deterministically() {
        let inst = Instance::planar(1.0, &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap();
        let (_, plan) = eascr(&inst, 2).unwrap();
        let g = build_comm_graph(&plan.final_instance().unwrap());
        let a = render_svg(&inst, &g, Some(&plan)).unwrap();
        assert_eq!(a, render_svg(&inst, &g, Some(&plan)).unwrap());
        assert_eq!(a.matches("<circle").count(), 3 + 2);
        assert_eq!(a.matches("stroke-dasharray").count(), 2);
        assert_eq!(a.matches("stroke=\"#4a6fa5\"").count(), 3);
        let plain = render_svg(&inst, &build_comm_graph(&inst), None).unwrap();
        assert!(!plain.contains("dasharray"));
    }

    #[test]
    fn three_d_is_rejected() {
        let inst = Instance::from_rows(1.0, &[vec![0.0, 0.0, 0.0], vec![0.5, 0.0, 0.5]]).unwrap();
        let g = build_comm_graph(&inst);
        assert!(matches!(render_svg(&inst, &g, None), Err(Error::RenderUnsupported(3))));
    }
}
