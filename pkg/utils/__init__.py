"""phermion-lab library: operator algebra, composite oscillators and verification suites."""
