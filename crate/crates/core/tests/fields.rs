use steady_glimm::gas::{GasModel, State};
use steady_glimm::quasi1d::{average_field, compare, solve_for_field, DuctGeometry};
use steady_glimm::scheme::{run, Cell, SchemeConfig, SolutionField};
use steady_glimm::wall::WallSpec;
use steady_glimm::Error;

const U1: State = State { u: 2.0, v: 0.0, p: 1.0, rho: 1.0, z: 0.0 };
const U2: State = State { u: 2.4, v: 0.0, p: 1.0, rho: 0.8, z: 0.0 };

fn background(h: f64, x_max: f64) -> SolutionField {
    run(&SchemeConfig::background(GasModel::default(), U1, U2, -0.5, h, x_max)).unwrap()
}

#[test]
fn constant_field_averages_to_itself() {
    let f = background(0.02, 0.2);
    for col in &f.columns {
        let a = average_field(&f, col.x).unwrap();
        assert!((a.a - 0.5).abs() < 1e-12);
        let m = a.mean.to_array();
        for (got, want) in m.iter().zip([0.8, 2.4, 1.0, 0.0]) {
            assert!((got - want).abs() < 1e-14, "{m:?}");
        }
    }
}

#[test]
fn two_equal_cells_average_to_their_mean() {
    let mut f = background(0.02, 0.2);
    let col = &mut f.columns[3];
    let (chi, g) = (col.contact_y, col.y_wall);
    let mid = 0.5 * (chi + g);
    col.cells.truncate(col.contact_index);
    col.cells.push(Cell { y_lo: chi, y_hi: mid, state: State { u: 1.0, ..U2 } });
    col.cells.push(Cell { y_lo: mid, y_hi: g, state: State { u: 3.0, ..U2 } });
    let x = col.x;
    let a = average_field(&f, x).unwrap();
    assert!((a.mean.u - 2.0).abs() < 1e-15);
}

#[test]
fn first_cell_is_cut_at_the_contact() {
    let mut f = background(0.02, 0.2);
    let col = &mut f.columns[2];
    // Move the tracked contact a quarter of the way into the first upper cell.
    let c0 = col.cells[col.contact_index];
    col.contact_y = c0.y_lo + 0.25 * (c0.y_hi - c0.y_lo);
    col.cells[col.contact_index].state.p = 2.0;
    let (chi, g, w) = (col.contact_y, col.y_wall, 0.75 * (c0.y_hi - c0.y_lo));
    let x = col.x;
    let a = average_field(&f, x).unwrap();
    assert!((a.a - (g - chi)).abs() < 1e-15);
    let expect = 1.0 + w / (g - chi);
    assert!((a.mean.p - expect).abs() < 1e-14, "{} vs {expect}", a.mean.p);
}

#[test]
fn only_column_abscissas_are_accepted() {
    let f = background(0.02, 0.2);
    assert!(matches!(average_field(&f, 0.03), Err(Error::Range(_))));
    assert!(matches!(average_field(&f, 0.4), Err(Error::Range(_))));
    assert!(average_field(&f, 0.04).is_ok());
}

#[test]
fn duct_area_follows_wall_minus_contact() {
    let mut cfg = SchemeConfig::background(GasModel::default(), U1, U2, -0.5, 0.02, 0.4);
    cfg.wall = WallSpec::Ramp { x0: 0.1, angle: 0.02 };
    let f = run(&cfg).unwrap();
    let geom = DuctGeometry::from_field(&f);
    assert!((geom.dx - 0.01).abs() < 1e-15);
    for col in &f.columns {
        assert!((geom.a[2 * col.k] - (col.y_wall - col.contact_y)).abs() < 1e-14);
    }
    let q = solve_for_field(&f).unwrap();
    let cmp = compare(&f, &q).unwrap();
    assert_eq!(cmp.rows.len(), f.columns.len());
    // The wall bounds the flow from above, so a rising wall widens the duct
    // and the supersonic stream speeds up.
    let last = cmp.rows.last().unwrap();
    assert!(last.a > 0.5 && last.duct.u > 2.4 && last.averaged.u > 2.4, "{last:?}");
}

#[test]
fn mismatched_grids_are_rejected() {
    let f = background(0.02, 0.2);
    let mut q = solve_for_field(&f).unwrap();
    q.dx *= 2.0;
    assert!(matches!(compare(&f, &q), Err(Error::GridMismatch(_))));
    let mut q = solve_for_field(&f).unwrap();
    q.nodes.truncate(5);
    assert!(matches!(compare(&f, &q), Err(Error::GridMismatch(_))));
}
