//! Regenerates `tests/fixtures/rossby_packet.json`, the converged local-energy
//! fraction of the reference Rossby packet.

use betaplane::model::Grid;
use betaplane::residual::edge_ratio;
use betaplane::rossby::{RossbyParameters, SpectralState, WavePacket};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = RossbyParameters {
        epsilon: 0.01,
        beta: 1.0,
        nu_h: 0.0,
    };
    let packet = WavePacket {
        wavenumber: 5.0,
        center_x: std::f64::consts::PI,
        width_x: 1.0,
        width_y: 1.0,
    };
    let (nx, ny, half_width, time, reach) = (256, 32768, 256.0, 1.0, 1.0);
    let grid = Grid::new(nx, ny, 4, half_width)?;
    let state = SpectralState::from_streamfunction(&packet.streamfunction(grid), params)?;
    let region = packet.support(reach, &grid);
    let later = state.propagate(time)?;
    let fraction = later.local_energy(&region)? / state.local_energy(&region)?;
    let edge = edge_ratio(later.velocity().component(0), &grid);
    let fixture = serde_json::json!({
        "params": params,
        "packet": packet,
        "reach": reach,
        "time": time,
        "grid": { "nx": nx, "ny": ny, "half_width": half_width },
        "edge_ratio": edge,
        "fraction": fraction,
    });
    println!("{}", serde_json::to_string_pretty(&fixture)?);
    Ok(())
}
