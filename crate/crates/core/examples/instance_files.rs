//! Instances and policies on disk, and validation of malformed input.

use pandora::format::{read_policy, write_policy, Instance};
use pandora::harness::{gen_dt, CostMode};
use pandora::model::validate;
use pandora::oracle::{opt_dt, OracleConfig};

fn main() -> pandora::Result<()> {
    let dir = std::env::temp_dir().join("pandora_files");
    std::fs::create_dir_all(&dir)?;
    let inst: Instance = gen_dt(3, 4, 2, CostMode::Random, false).into();
    let path = dir.join("dt.json");
    inst.write(&path)?;
    println!("{}", std::fs::read_to_string(&path)?);

    let back = Instance::read(&path)?;
    let Instance::Dt(dt) = &back else { unreachable!() };
    let opt = opt_dt(dt, &OracleConfig::default())?;
    let ppath = dir.join("policy.json");
    write_policy(&opt.policy, &ppath)?;
    assert_eq!(read_policy(&ppath)?, opt.policy);

    let broken = inst.to_json().replacen("\"1/", "\"3/", 1);
    match Instance::from_json(&broken) {
        Ok(i) => println!("violations: {:?}", validate(&i)),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
