from fastapi import FastAPI

from configs import app_config
from curves_api import router as curves_router
from simulation_api import router as simulation_router
from utils import configure_logging

configure_logging()

app = FastAPI(
    title=app_config.api_title,
    description=app_config.api_description,
    version=app_config.api_version,
)

# Include routers
app.include_router(curves_router, tags=["Curves"])
app.include_router(simulation_router, tags=["Simulation"])

# Health check endpoint
@app.get("/")
def read_root():
    return {"status": "ok", "message": "Constrained Gaussian Transport API is running."}
