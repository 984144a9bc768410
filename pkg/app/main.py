from typing import Any, Dict

from fastapi import Depends, FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool

from app.manager import settings_manager
from app.manager.study_manager import study_manager
from app.utils.auth import verify_api_key
from app.utils.errors import DeJongError, KappaUnknown, SpaceTooLarge, SpecError
from app.utils.logger import logger

# 创建 FastAPI 应用
app = FastAPI(title="DeJong Verify API")

# 配置 CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings_manager.allow_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


def status_for(error: DeJongError) -> int:
    """异常到 HTTP 状态码：资源保护 413，缺少 κ 422，其余输入错误 400"""
    if isinstance(error, SpaceTooLarge):
        return 413
    if isinstance(error, KappaUnknown):
        return 422
    return 400


@app.exception_handler(DeJongError)
async def dejong_error_handler(request: Request, exc: DeJongError):
    logger.error(f"{request.url.path} 失败 ({type(exc).__name__}): {exc}")
    return JSONResponse(
        status_code=status_for(exc),
        content={"error": type(exc).__name__, "detail": str(exc), "exit_code": exc.exit_code},
    )


async def _body(request: Request) -> Dict[str, Any]:
    try:
        body = await request.json()
    except ValueError as e:
        raise SpecError(f"请求体不是合法 JSON: {e}") from e
    if not isinstance(body, dict):
        raise SpecError("请求体必须是 JSON 对象")
    return body


def _spec(body: Dict[str, Any]):
    if "spec" not in body:
        raise SpecError("请求体缺少 spec")
    return study_manager.load(body["spec"])


@app.get("/", dependencies=[Depends(verify_api_key)])
async def root():
    return {"message": "Welcome to DeJong Verify API"}


@app.post("/v1/decompose", dependencies=[Depends(verify_api_key)])
async def decompose(request: Request):
    """Hoeffding 分解：{"spec": {...}}"""
    body = await _body(request)
    spec = _spec(body)
    return await run_in_threadpool(study_manager.decompose, spec)


@app.post("/v1/verify", dependencies=[Depends(verify_api_key)])
async def verify(request: Request):
    """可交换对核查：{"spec": {...}, "kappa": "4", "chain": true}

    数学性质不成立时仍返回 200，结果在 passed 与 violations 字段里
    """
    body = await _body(request)
    spec = _spec(body)
    doc, _ = await run_in_threadpool(study_manager.verify, spec, body.get("kappa"), bool(body.get("chain", False)))
    return doc


@app.post("/v1/bound", dependencies=[Depends(verify_api_key)])
async def bound(request: Request):
    """界的计算：{"spec": {...}, "kappa", "mc", "seed", "delta"} 或 {"inputs": {"e4", "rho", "kappa", "p", "n"}}"""
    body = await _body(request)
    inputs = body.get("inputs")
    if inputs is not None:
        missing = [key for key in ("e4", "rho", "p", "n") if key not in inputs]
        if missing:
            raise SpecError(f"inputs 缺少 {', '.join(missing)}")
        report = study_manager.bound_from_inputs(
            inputs["e4"],
            inputs["rho"],
            inputs.get("kappa"),
            int(inputs["p"]),
            int(inputs["n"]),
            bool(inputs.get("symmetric", False)),
        )
    else:
        spec = _spec(body)
        report = await run_in_threadpool(
            study_manager.bound, spec, body.get("kappa"), body.get("mc"), body.get("seed"), body.get("delta")
        )
    return report.to_dict()


@app.post("/v1/distance", dependencies=[Depends(verify_api_key)])
async def distance(request: Request):
    """到 N(0,1) 的距离：{"spec": {...}, "mc", "seed", "delta"}"""
    body = await _body(request)
    spec = _spec(body)
    result = await run_in_threadpool(
        study_manager.distances, spec, body.get("mc"), body.get("seed"), body.get("delta")
    )
    if result is None:
        raise SpecError(f"{spec.label()} 无法精确计算距离，请指定 mc")
    return result.to_dict()


@app.get("/v1/settings", dependencies=[Depends(verify_api_key)])
async def get_settings():
    """当前设置（不含 API Key）"""
    return settings_manager.public_config()
