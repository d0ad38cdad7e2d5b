//! Group law, dilations and the homogeneous norm on the Heisenberg group
//! and on the quaternionic H-type group.

use hpw_core::group::{dilate, hom_norm, inverse, DescriptorSpec, GroupDescriptor, GroupPoint};

fn main() -> hpw_core::Result<()> {
    let h1 = GroupDescriptor::heisenberg(1)?;
    let x = GroupPoint::new(vec![1.0], vec![0.0], vec![0.5])?;
    let y = GroupPoint::new(vec![0.0], vec![2.0], vec![-1.0])?;
    let xy = h1.multiply(&x, &y)?;
    let yx = h1.multiply(&y, &x)?;
    println!("H^1: x y = {xy:?}");
    println!("     y x = {yx:?}  (the central parts differ by the commutator)");
    println!("     x x^-1 = {:?}", h1.multiply(&x, &inverse(&x))?);
    println!("     |x| = {:.6}, |delta_2 x| = {:.6}", hom_norm(&x), hom_norm(&dilate(&x, 2.0)?));
    println!("     Q = {}", h1.homogeneous_dim());

    let quat = GroupDescriptor::quaternionic();
    println!("quaternionic: n = {}, k = {}, Q = {}", quat.n(), quat.k(), quat.homogeneous_dim());
    let lambda = [0.3, -0.4, 1.2];
    println!("  eta(lambda) = {:?} (all equal |lambda| = 1.3)", quat.eta(&lambda)?);
    let v = [1.0, 0.0, 0.0, 0.0];
    let w = [0.0, 1.0, 0.0, 0.0];
    println!("  [e1, e2] = {:?}", quat.commutator(&v, &w));

    // descriptors round-trip through JSON and carry a stable hash
    let json = quat.to_json();
    let again = GroupDescriptor::from_json(&json)?;
    assert_eq!(again.hash_hex(), quat.hash_hex());
    println!("  descriptor hash {}", &quat.hash_hex()[..16]);
    let spec = DescriptorSpec::Heisenberg { n: 2 };
    println!("H^2 from spec: Q = {}", GroupDescriptor::from_spec(&spec)?.homogeneous_dim());
    Ok(())
}
