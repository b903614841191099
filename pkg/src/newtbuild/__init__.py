"""Exact piecewise-linear machinery relating Newton polygons of formal modules to the apartment of PGL_n."""
