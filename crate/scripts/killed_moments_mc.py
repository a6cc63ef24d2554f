"""Monte Carlo cross-check of the moment oracle: planar Brownian motion from
(2, 0), killed on the unit circle (with a Brownian-bridge crossing
correction), reweighted by ln|W| / ln 2.
"""
import numpy as np
rng=np.random.default_rng(1)
N=200000; n=2000; dt=1.0/n
x=np.full(N,2.0); y=np.zeros(N); alive=np.ones(N,bool)
for k in range(n):
    x1=x+np.sqrt(dt)*rng.standard_normal(N); y1=y+np.sqrt(dt)*rng.standard_normal(N)
    r0=np.hypot(x,y); r1=np.hypot(x1,y1)
    # bridge correction treating radial distance as 1d locally
    p=np.exp(-2*np.clip(r0-1,0,None)*np.clip(r1-1,0,None)/dt)
    hit=(r1<=1)|(rng.random(N)<p)
    alive&=~hit
    x,y=x1,y1
r=np.hypot(x,y)
s=alive.mean()
print("P(tau>1)=",s,"E[1/lnR]=",s/np.log(2),"vs",1/np.log(2))
m2=np.mean(np.where(alive,r*r*np.log(np.where(alive,r,2)),0))/np.log(2)
se=np.std(np.where(alive,r*r*np.log(np.where(alive,r,2)),0))/np.log(2)/np.sqrt(N)
print("E R^2 =",m2,"+-",se,"vs",4+2*(1+1/np.log(2)))
