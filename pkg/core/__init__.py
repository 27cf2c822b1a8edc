# Core package: parameters, grids and shared schemas
