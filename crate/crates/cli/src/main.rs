fn main() { println!("geosense"); }
