use qscatter::arrival::{arrival_distribution, arrival_width, default_t_max, detector_sweep};
use qscatter::model::{Family, PacketParams, WaveField};
use qscatter::numerics::QuadratureSpec;

fn field(f: Family) -> WaveField<f64> {
    WaveField::new(f, PacketParams::default(), QuadratureSpec::default()).unwrap()
}

fn peak_time(f: &WaveField<f64>, x_d: f64) -> f64 {
    let r = arrival_distribution(f, x_d, default_t_max(f, x_d), &f.quad).unwrap();
    let i = (0..r.pi_values.len())
        .max_by(|&a, &b| r.pi_values[a].total_cmp(&r.pi_values[b]))
        .unwrap();
    r.t_grid[i]
}

#[test]
fn interacting_packet_peaks_before_free_gaussian() {
    let a = peak_time(&field(Family::InteractingNonreflecting), 2.0);
    let b = peak_time(&field(Family::FreeGaussian), 2.0);
    assert!(a < b, "{a} vs {b}");
}

#[test]
fn mean_time_and_width_grow_with_detector_distance() {
    let q = QuadratureSpec::default();
    let detectors = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let fields: Vec<_> = [
        Family::InteractingNonreflecting,
        Family::FreeNonreflecting,
        Family::FreeGaussian,
    ]
    .into_iter()
    .map(field)
    .collect();
    let records = detector_sweep(&fields, &detectors, None, &q);
    assert_eq!(records.len(), fields.len() * detectors.len());
    for (i, f) in fields.iter().enumerate() {
        let row: Vec<_> = records[i * detectors.len()..(i + 1) * detectors.len()]
            .iter()
            .map(|r| r.as_ref().unwrap())
            .collect();
        for (r, &d) in row.iter().zip(&detectors) {
            assert_eq!(r.x_d, d);
        }
        assert!(
            row.windows(2).all(|w| w[1].mean_time > w[0].mean_time),
            "{}",
            f.family
        );
        assert!(
            row.windows(2)
                .all(|w| arrival_width(w[1]) > arrival_width(w[0])),
            "{}",
            f.family
        );
    }
}
