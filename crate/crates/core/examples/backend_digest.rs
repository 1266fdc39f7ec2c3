use frames_core::matrix::DEFAULT_TOL;
use frames_core::random::random_density;
use frames_core::sets::{compose, mub_prime, weyl_complete};
use frames_core::tomography::{estimate, sample_counts};

fn main() {
    let set = mub_prime(3, DEFAULT_TOL).unwrap();
    let rho = random_density(3, 9);
    let counts = sample_counts(&set, &rho, 250_000, 11, DEFAULT_TOL).unwrap();
    println!("{}", counts.to_json().unwrap());
    let est = estimate(&set, &counts, DEFAULT_TOL).unwrap();
    println!("{}", frames_core::json::matrix_to_json(&est).unwrap());
    let w = weyl_complete(6, DEFAULT_TOL).unwrap();
    println!("{}", w.to_json().unwrap());
    let two = mub_prime(2, DEFAULT_TOL).unwrap();
    let c = compose(&two, &two, DEFAULT_TOL).unwrap();
    println!("{}", frames_core::classify::classify(&c, DEFAULT_TOL).to_json().unwrap());
}
