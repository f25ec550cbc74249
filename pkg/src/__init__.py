# hopfcheck: bialgebra presentation checker
