"""Maxwell-Chern-Simons-Higgs simulator in Coulomb gauge on a periodic torus."""
